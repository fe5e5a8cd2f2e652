import numpy as np
import pytest

from sdpxlab.auxgraph import aux_graph_stable
from sdpxlab.colors import Algo, run_to_stable
from sdpxlab.core import SdpInstance, SizeGuardError, SparseSymMatrix
from sdpxlab.verify import (
    latin_square_instance,
    prop_diag_pair_instance,
    sample_instances,
)


def test_matches_direct_on_named_instances():
    for inst in (prop_diag_pair_instance(), latin_square_instance()):
        direct, _ = run_to_stable(Algo.VC2FWL, inst)
        assert aux_graph_stable(inst) == direct


def test_matches_direct_on_sampled_instances():
    for inst in sample_instances(23, per_generator=1, n_lo=3, n_hi=8):
        direct, _ = run_to_stable(Algo.VC2FWL, inst)
        assert aux_graph_stable(inst) == direct


def test_single_cell_instance():
    inst = SdpInstance(n=1, C=[[2.0]],
                       A=(SparseSymMatrix.from_coords(1, [(0, 0, 1.0)]),),
                       b=[1.0])
    part = aux_graph_stable(inst)
    assert part.n_var_classes == 1 and part.n_con_classes == 1


def test_size_guard():
    n = 25
    inst = SdpInstance(n=n, C=np.zeros((n, n)),
                       A=(SparseSymMatrix.from_coords(n, [(0, 0, 1.0)]),),
                       b=[1.0])
    with pytest.raises(SizeGuardError):
        aux_graph_stable(inst)
