"""How much can an eavesdropper learn from conjugate-coded tags?

Walks the chain from the single-qubit entropy constant to the per-block
equivocation floor, then compares the ceiling with what the best known
single-qubit measurement actually extracts.
"""

from qauth.bitsource import BitBlock, uniform_distribution
from qauth.bounds import (breidbart_information, conjugate_coding_entropy,
                          holevo_floor, verify_holevo_against_povm)
from qauth.quantum import (breidbart_measurement, density_for_block,
                           povm_power, spectrum, von_neumann_entropy)

print("With a fair basis key, each tag qubit looks to the adversary like")
print("an equal mixture of a computational and a diagonal code state.\n")

rho = density_for_block(BitBlock.zeros(1))
lam = spectrum(rho).eigenvalues
s_star = von_neumann_entropy(rho)
print(f"  eigenvalues of the one-qubit mixture : {lam[0]:.6f}, {lam[1]:.6f}")
print(f"  von Neumann entropy S*               : {s_star:.10f} bits")
print(f"  closed form                          : "
      f"{conjugate_coding_entropy():.10f} bits\n")

print("The entropy is additive over tag positions, so a k-bit tag leaves")
print("the adversary at least k(1 - S*) bits short of the basis key:\n")
print("    k   S(rho)      floor = k(1-S*)")
for k in range(1, 7):
    report = holevo_floor(uniform_distribution(k), BitBlock.zeros(k))
    sk = von_neumann_entropy(density_for_block(BitBlock.zeros(k)))
    print(f"    {k}   {sk:8.6f}   {report.value:8.6f} bits")

print("\nThe ceiling S* is what any measurement could extract at best.")
print("The intermediate-angle measurement, the strongest known single-qubit")
print("strategy, extracts strictly less:\n")
one = verify_holevo_against_povm(uniform_distribution(1), BitBlock.zeros(1),
                                 breidbart_measurement())
print(f"  extracted information I(X;Z) : {one.value:.6f} bits")
print(f"  analytic channel value       : {breidbart_information():.6f} bits")
print(f"  Holevo ceiling S*            : {one.bound:.6f} bits")
print(f"  unclaimed gap                : {one.bound - one.value:.6f} bits")

print("\nThe same inequality holds measured jointly over two qubits:")
two = verify_holevo_against_povm(uniform_distribution(2), BitBlock.zeros(2),
                                 povm_power(breidbart_measurement(), 2))
print(f"  I(X;Z) = {two.value:.6f} <= S = {two.bound:.6f} bits "
      f"({'ok' if two.satisfied else 'violated'})")
