import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.core.excecoes import QuadraturaNaoConvergente
from src.utils.integration import integrar, nos_gauss_legendre, pontos_de_quebra


def test_nos_gauss_legendre_integram_polinomios():
    nos, pesos = nos_gauss_legendre(4)
    # regra de 4 nós é exata até grau 7
    assert float(np.sum(pesos * nos ** 6)) == pytest.approx(2.0 / 7.0, rel=1e-14)
    assert not nos.flags.writeable


def test_pontos_de_quebra_inteiros_e_extras():
    pontos = pontos_de_quebra(-1.5, 2.0, extras=[0.25, 7.0])
    np.testing.assert_allclose(pontos, [-1.5, -1.0, 0.0, 0.25, 1.0, 2.0])


def test_integral_exponencial():
    valor = integrar(lambda u: np.exp(-u), 0.0, 5.0)
    assert valor == pytest.approx(1.0 - math.exp(-5.0), rel=1e-12)


def test_intervalo_vazio():
    assert integrar(np.exp, 2.0, 2.0) == 0.0
    assert integrar(np.exp, 3.0, 2.0) == 0.0


def test_degrau_com_quebra_explicita():
    degrau = (lambda u: np.where(u >= 0.3, 1.0, 0.0))
    assert integrar(degrau, 0.0, 1.0, quebras_extras=[0.3]) == pytest.approx(0.7, rel=1e-14)


def test_descontinuidade_sem_quebra_nao_converge():
    degrau = (lambda u: np.where(u >= 0.3, 1.0, 0.0))
    with pytest.raises(QuadraturaNaoConvergente):
        integrar(degrau, 0.0, 1.0, tol_rel=1e-15, limite_refinamento=1)


@settings(max_examples=40, deadline=None)
@given(
    a=st.floats(min_value=-10.0, max_value=10.0),
    largura=st.floats(min_value=0.01, max_value=30.0),
    tau=st.floats(min_value=0.1, max_value=10.0),
)
def test_integral_de_exponencial_decrescente(a, largura, tau):
    b = a + largura
    exato = tau * (math.exp(-a / tau) - math.exp(-b / tau))
    assert integrar(lambda u: np.exp(-u / tau), a, b) == pytest.approx(exato, rel=1e-8)
