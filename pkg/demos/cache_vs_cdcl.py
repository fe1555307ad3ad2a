"""Compare the CacheSAT cache size with the conflict count of the
restart-every-conflict CDCL on XOR chains of growing length."""
from pdlab.cachesat import solve_cachesat
from pdlab.cdcl import CdclConfig, solve_cdcl
from pdlab.encodings.families import xor_chain, xor_chain_decomposition
from pdlab.structure import order_from_decomposition

for w in (1, 2):
    print(f"w={w}")
    for n in range(4, 10):
        f = xor_chain(n, w)
        order = order_from_decomposition(xor_chain_decomposition(n, w))
        cs = solve_cachesat(f, order)
        cd = solve_cdcl(f, CdclConfig(order=order))
        print(f"  n={n:2d}  dcsf={cs.dcsf_count:4d}  10*dcsf^2={10 * cs.dcsf_count ** 2:6d}  "
              f"cdcl conflicts={cd.conflicts:6d}")
