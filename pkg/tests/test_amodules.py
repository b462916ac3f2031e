import pytest

from adamsext.amodules import (FDModule, ModuleError, cofibration_ses, sphere_module, toda_smith_module,
                               validate_module)
from adamsext.milnor import AlgebraContext


@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("n", [-1, 0, 1, 2])
def test_toda_smith_modules_are_modules(p, n):
    ctx = AlgebraContext(p)
    mod = toda_smith_module(ctx, n)
    assert len(mod.basis) == 2 ** (n + 1)
    assert validate_module(mod).ok


def test_poincare_series_p5(ctx5):
    assert toda_smith_module(ctx5, 0).poincare() == {0: 1, 1: 1}
    assert toda_smith_module(ctx5, 1).poincare() == {0: 1, 1: 1, 9: 1, 10: 1}
    v2 = toda_smith_module(ctx5, 2).poincare()
    assert sum(v2.values()) == 8 and max(v2) == 1 + 9 + 49


@pytest.mark.parametrize("n", [0, 1, 2])
def test_cofibration_ses_exact(ctx5, n):
    ses = cofibration_ses(ctx5, n)
    assert ses.shift == 2 * 5**n - 1
    assert ses.check_exact() == []
    total = {t: ses.sub.dim_in_degree(t - ses.shift) + ses.quotient.dim_in_degree(t) for t in range(120)}
    assert all(ses.middle.dim_in_degree(t) == total[t] for t in range(120))


def test_bad_module_indices(ctx5):
    with pytest.raises(ModuleError):
        toda_smith_module(ctx5, 3)
    with pytest.raises(ModuleError):
        cofibration_ses(ctx5, 3)


def test_json_round_trip(ctx5):
    mod = toda_smith_module(ctx5, 1)
    again = FDModule.from_json(mod.to_json())
    assert again.dumps() == mod.dumps()
    assert sphere_module(ctx5).poincare() == {0: 1}


def test_validation_catches_broken_action(ctx5):
    mod = toda_smith_module(ctx5, 1)
    key = next(k for k in mod.action if k[0].q_part == (1,))
    broken = FDModule(ctx5, "broken", mod.basis, {k: v for k, v in mod.action.items() if k != key})
    assert not validate_module(broken).ok
