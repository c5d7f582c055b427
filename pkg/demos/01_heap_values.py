# coding: utf-8

# # Heaps as values
#
# A heap here is a finite list of objects. Addresses are just positions,
# counted from 1, and address 0 plays the role of null. This notebook pokes
# at the reference operations directly before any SMT text is involved.

# In[1]:

from heapsmt.semantics import Address, Element, HeapOps, allocate_n, format_value

d = Element("O", 0)          # the default object
ops = HeapOps(d, "AllocResultH")
a, b = Element("O", 1), Element("O", 2)


# Allocation appends, so the address handed out is always the new size.

# In[2]:

h0 = ops.empty()
h1, p1 = ops.allocate_pair(h0, a)
h2, p2 = ops.allocate_pair(h1, b)
print(format_value(h2), format_value(p1), format_value(p2))


# Writes only touch valid cells. Writing to null or past the end is a no-op,
# and reading there gives back the default object.

# In[3]:

print(ops.write(h2, Address(5), a) == h2)
print(format_value(ops.read(h2, Address(0))), format_value(ops.read(h2, p2)))


# Two heaps with the same size hand out the same fresh address, whatever
# they store. And i allocations from the empty heap end at address i.

# In[4]:

other, _ = ops.allocate_pair(ops.allocate_pair(h0, b)[0], b)
print(ops.allocate_pair(h2, d)[1] == ops.allocate_pair(other, a)[1])
print([format_value(allocate_n(ops, i)[1]) for i in range(4)])


# # The axioms, checked exhaustively
#
# Every axiom is evaluated over all heaps up to size 2, two objects and
# addresses up to 3. Bigger bounds work too, they just take longer.

# In[5]:

from heapsmt.semantics import Bounds, run_battery

for r in run_battery(Bounds(2, 2, 3)):
    print(f"{r.axiom:7s} {'ok' if r.passed else 'FAIL'}  ({r.checked} instances)")
