# coding: utf-8

# # Solving ground heap conjunctions
#
# The solver accepts conjunctions of literals over one heap signature. It
# returns a verdict and, for sat, a model that can be fed back to the
# evaluator.

# In[1]:

from heapsmt.redgen import UNSORTED_PREAMBLE
from heapsmt.semantics import Evaluator, format_value
from heapsmt.solver import conjunction_from_text, solve

text = UNSORTED_PREAMBLE + """
(declare-const h Heap) (declare-const p Address)
(declare-const o1 O) (declare-const o2 O)
(assert (= (read (write h p o1) p) o2))
(assert (not (= o1 o2)))
"""
conj = conjunction_from_text(text)
res = solve(conj)
print(res.verdict)
print({k: format_value(v) for k, v in res.model.values.items()})


# Writing and then reading back can miss: the only way is for p to be
# invalid, and then the read returns the default object.

# In[2]:

ev = Evaluator(conj.table, res.model)
print(all(ev.eval(lit) is True for lit in conj.literals))


# # A small interpolation puzzle
#
# A says h2 is h1 with one valid cell overwritten. B says h1 and h2 differ
# at two distinct valid addresses. Each is fine alone, but one write cannot
# change two cells.

# In[3]:

from heapsmt.redgen import emit_lemma2_instance

inst = emit_lemma2_instance()
for name, t in (("A", inst.a), ("B", inst.b), ("A and B", inst.combined)):
    print(name, solve(conjunction_from_text(t)).verdict)


# # SAT inside the heap
#
# Each Boolean variable picks one of two valid addresses, and each clause
# writes True to its literals' addresses, then reads cell 1 back. Solving
# the heap formula solves the CNF.

# In[4]:

from heapsmt.redgen import Cnf, brute_force, decode, sat_to_heap

cnf = Cnf.of(3, [[1, 2], [-1, 3], [-2, -3], [1, -3]])
heap_conj, heap_text = sat_to_heap(cnf)
r = solve(heap_conj)
print(r.verdict, "brute force:", brute_force(cnf))
print("decoded:", decode(cnf, r.model), cnf.evaluate(decode(cnf, r.model)))


# # Cross-checking against enumeration
#
# The enumeration oracle walks every model up to a size bound derived from
# the formula. A short differential run:

# In[5]:

from heapsmt.solver.fuzz import differential

rep = differential(40, seed=3)
print(len(rep.checked), "checked,", rep.rejected, "skipped,", len(rep.disagreements), "disagree")
