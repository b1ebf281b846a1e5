"""Constructors and validators for the ring properties SR1, GEN, EXP, UNIT and CONJ."""
