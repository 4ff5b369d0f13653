# Staircase - standard monomials, S_P brackets and the large-irreducible atlas
