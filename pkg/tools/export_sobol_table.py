"""Export the Joe-Kuo ``new-joe-kuo-6.21201`` direction numbers to text.

SciPy redistributes the table as ``_sobol_direction_numbers.npz`` (full
primitive polynomials plus initial direction integers).  This script rewrites
it in the original Joe-Kuo text layout so the package does not depend on a
private SciPy file at run time::

    python tools/export_sobol_table.py src/amshd/randomness/data/new-joe-kuo-6.21201.txt
"""

import os
import sys

import numpy as np
import scipy.stats

HEADER = (
    "# Sobol direction numbers, S. Joe and F. Y. Kuo, new-joe-kuo-6.21201\n"
    "# https://web.maths.unsw.edu.au/~fkuo/sobol/ (as redistributed by SciPy)\n"
    "# columns: d s a m_1 ... m_s\n"
    "#   d   dimension index (dimension 1 is implicit: all m_i = 1)\n"
    "#   s   degree of the primitive polynomial\n"
    "#   a   polynomial coefficients a_1..a_{s-1} packed MSB-first\n"
    "#   m_i initial direction integers (odd, m_i < 2**i)\n"
    "d s a m_i\n"
)


def main(out_path: str) -> None:
    src = os.path.join(os.path.dirname(scipy.stats.__file__), "_sobol_direction_numbers.npz")
    table = np.load(src)
    poly, vinit = table["poly"], table["vinit"]
    lines = [HEADER]
    for d in range(2, len(poly) + 1):
        p = int(poly[d - 1])
        s = p.bit_length() - 1
        a = (p >> 1) & ((1 << (s - 1)) - 1)
        m = " ".join(str(int(v)) for v in vinit[d - 1][:s])
        lines.append(f"{d} {s} {a} {m}\n")
    with open(out_path, "w") as fh:
        fh.writelines(lines)


if __name__ == "__main__":
    main(sys.argv[1])
