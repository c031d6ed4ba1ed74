import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.core.excecoes import SerieDivergente
from src.core.perfis import (
    PerfilAlfa, TipoPerfil, limite_cauda_alfa, soma_alfa, somar_serie, valor_alfa
)
from src.utils.integration import integrar


def test_perfil_exponencial_valores():
    perfil = PerfilAlfa(TipoPerfil.EXPONENCIAL, 2.0)
    assert valor_alfa(perfil, 0.0) == 1.0
    assert valor_alfa(perfil, -0.5) == 0.0
    assert valor_alfa(perfil, 2.0) == pytest.approx(math.exp(-1.0))


def test_perfil_alfa_pico_em_tau():
    perfil = PerfilAlfa(TipoPerfil.ALFA, 1.5)
    assert perfil.pico == 1.5
    t = np.linspace(0.0, 10.0, 2001)
    assert t[np.argmax(perfil.valor(t))] == pytest.approx(1.5, abs=0.01)


def test_soma_supremos_exponencial_forma_fechada():
    for tau in (0.3, 1.0, 4.0):
        esperado = 1.0 / (1.0 - math.exp(-1.0 / tau))
        assert PerfilAlfa(TipoPerfil.EXPONENCIAL, tau).soma_supremos() == pytest.approx(esperado, rel=1e-12)


def test_soma_supremos_alfa():
    perfil = PerfilAlfa(TipoPerfil.ALFA, 1.0)
    # A(0) = valor(1) = e^-1 e A(n) = n e^-n para n >= 1
    n = np.arange(1, 400)
    esperado = math.exp(-1.0) + math.fsum(n * np.exp(-n))
    assert perfil.soma_supremos() == pytest.approx(esperado, rel=1e-12)


def test_soma_alfa_ignora_disparos_futuros():
    perfil = PerfilAlfa(TipoPerfil.EXPONENCIAL, 1.0)
    assert soma_alfa(perfil, 3.0, []) == 0.0
    assert soma_alfa(perfil, 3.0, [1.0, 2.0, 3.0, 5.0]) == pytest.approx(math.exp(-2.0) + math.exp(-1.0))


def test_serie_divergente():
    with pytest.raises(SerieDivergente):
        somar_serie(lambda l: np.ones_like(l), lambda l: 1.0, max_termos=1024)


@settings(max_examples=30, deadline=None)
@given(
    tipo=st.sampled_from(list(TipoPerfil)),
    tau=st.floats(min_value=0.2, max_value=5.0),
    grau=st.integers(min_value=0, max_value=3),
    x=st.floats(min_value=0.0, max_value=20.0),
)
def test_primitiva_e_cauda_coerentes_com_a_integral(tipo, tau, grau, x):
    perfil = PerfilAlfa(tipo, tau, grau)
    numerica = integrar(perfil.valor, 0.0, x, tol_rel=1e-11, nos_por_unidade=10, limite_refinamento=8)
    assert float(perfil.primitiva(x)) == pytest.approx(numerica, rel=1e-8, abs=1e-12)

    # massa total = primitiva(x) + cauda(x)
    total = tau * math.factorial(perfil.d)
    assert float(perfil.primitiva(x)) + limite_cauda_alfa(perfil, x) == pytest.approx(total, rel=1e-10)
