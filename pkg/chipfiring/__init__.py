"""
Chipfiring package.
Contains hereditary chip-firing dynamics, the recurrent/spanning-tree bijection,
brute-force oracles and the corpus verification scripts.
"""
