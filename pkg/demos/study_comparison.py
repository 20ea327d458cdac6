"""
Putting published density studies on one scale
===============================================

Simulation, analytical and deployment studies report traffic in
different ways. Reducing each to bit/s and devices per km^2 makes them
comparable with the worst-case table.
"""

from lpwanplan import harmonize

for s in harmonize.builtin_studies():
    row = harmonize.harmonize(s)
    c_rho = "-" if row.c_rho is None else f"{row.c_rho:10.3f}"
    print(f"{row.label:<26} {s.kind:<11} n_rho {row.n_rho:11.3f}  C_rho {c_rho}")

# Records flag inputs that had to be assumed
for s in harmonize.builtin_studies():
    if s.assumed:
        print(f"{s.label}: assumed {', '.join(s.assumed)}")
