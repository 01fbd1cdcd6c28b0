"""Receptor classes of synaptic connections."""

from __future__ import annotations

from enum import Enum


class Receptor(Enum):
    GLUTAMATE = "GLUTAMATE"
    GABA = "GABA"
    # Dopamine-receptor marks: the synapse still carries its (excitatory)
    # weight current, but the weight is rescaled by the receptor gain in
    # force at delivery time.
    DOPAMINE_D1 = "DOPAMINE_D1"
    DOPAMINE_D2 = "DOPAMINE_D2"

    @property
    def excitatory(self) -> bool:
        return self is not Receptor.GABA
