# coding: utf-8

# # Lowering heaps to arrays
#
# Solvers without native heap support can still take these formulas once
# each heap becomes a record of a size counter and an array. The catch is
# that a naive lowering is not faithful, and this notebook shows where.

# In[1]:

from heapsmt.redgen import MOTIVATION
from heapsmt.transpiler import TranspileConfig, leaked_symbols, transpile_script

result = transpile_script(MOTIVATION)
print(result.text[:900])
print("heap symbols left over:", leaked_symbols(result))


# # What goes wrong without corrections
#
# Run the axiom battery against the array model itself. With the raw
# encoding, two records can agree on every valid cell and still differ
# (junk past the end, or a negative counter), and nothing stops an
# address from being negative.

# In[2]:

from heapsmt.cli import show
from heapsmt.transpiler import run_array_battery

for cfg, label in ((TranspileConfig.uncorrected(), "raw"), (TranspileConfig(), "corrected")):
    bad = [r for r in run_array_battery(cfg=cfg) if not r.passed]
    print(label, "failures:", [r.axiom for r in bad])
    for r in bad:
        print("   ", r.axiom, {k: show(v) if not isinstance(v, int) else v
                               for k, v in r.counterexample.items()})


# The corrected lowering replaces heap equality by a predicate that only
# compares valid cells and the size, guards every heap variable with a
# non-negative size and every address variable with a non-negative index.
# The equality predicate alone is not enough: the sizes -1 and 0 both leave
# no cells valid, so the size guard has to be there too.

# In[3]:

from heapsmt.transpiler import ARRAY_BOUNDS, check_axiom_array

only_eq = TranspileConfig(emit_heap_eq=True, emit_wf_guards=False)
print(check_axiom_array("ext", ARRAY_BOUNDS, only_eq).passed)
print(check_axiom_array("ext", ARRAY_BOUNDS, TranspileConfig()).passed)
