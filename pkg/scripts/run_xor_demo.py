#!/usr/bin/env python3
"""End-to-end demo on the XOR fixture.

XOR is the canonical dependent-feature case: each feature alone carries zero
information about the output, the pair determines it completely.  The
dependent-feature scores split the credit evenly while the marginal
independent-feature scores stay at zero.
"""

import excir


def main() -> None:
    dataset, _ = excir.synth("xor", 16)
    report = excir.explain(dataset, mode="full", bins=2)
    print(f"n = {report['globals']['n']}, sample size = {report['globals']['n_prime']}")
    print(f"environment gap   = {report['globals']['env_gap']}")
    print(f"joint information = {report['globals']['jmi_bits']} bits")
    print()
    print(f"{'feature':<10}{'pcir':>8}{'mcir':>8}{'cmmi':>8}{'H(f)':>8}")
    for feat in report["features"]:
        print(
            f"{feat['name']:<10}{feat['pcir']:>8.3f}{feat['mcir']:>8.3f}"
            f"{feat['cmmi_bits']:>8.3f}{feat['entropy_bits']:>8.3f}"
        )


if __name__ == "__main__":
    main()
