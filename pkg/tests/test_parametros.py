import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.core.excecoes import (
    CapacitanciaNaoPositiva, CondutanciaNegativa, ParametroInvalido, RefratarioForaDoIntervalo, SigmaNaoPositivo
)
from src.core.parametros import (
    CorrenteConstante, CorrenteDegrau, CorrenteSenoidal, EspecificacaoCorrente, ParametrosRede,
    ParametrosValidados, alfa_mais, corrente_externa_em, derivar_limites, limites_de, parametros_de_dicionario,
    validar_parametros
)


def test_instancia_minima_valida(isolado):
    assert isinstance(isolado, ParametrosValidados)
    assert isolado.n_neuronios == 1
    assert isolado.tau_fuga[0] == pytest.approx(2.0)


def test_parametros_sao_somente_leitura(isolado):
    with pytest.raises(ValueError):
        isolado.capacitancia[0] = 2.0


def test_sigma_reset_nulo(dados_isolado):
    dados_isolado["reset_std"] = 0.0
    with pytest.raises(SigmaNaoPositivo) as erro:
        parametros_de_dicionario(dados_isolado)
    assert erro.value.campo == "reset_std"


def test_condutancia_negativa_indica_o_indice(dados_acoplado):
    dados_acoplado["max_conductance"] = [[0.0, -0.5], [0.4, 0.0]]
    with pytest.raises(CondutanciaNegativa) as erro:
        parametros_de_dicionario(dados_acoplado)
    assert erro.value.indice == (0, 1)


def test_capacitancia_nao_positiva(dados_acoplado):
    dados_acoplado["capacitance"] = [1.0, 0.0]
    with pytest.raises(CapacitanciaNaoPositiva) as erro:
        parametros_de_dicionario(dados_acoplado)
    assert erro.value.indice == (1,)


@pytest.mark.parametrize("refratario", [-0.1, 1.0, 2.5])
def test_refratario_fora_do_intervalo(dados_isolado, refratario):
    dados_isolado["refractory"] = refratario
    with pytest.raises(RefratarioForaDoIntervalo):
        parametros_de_dicionario(dados_isolado)


def test_campo_obrigatorio_ausente(dados_isolado):
    del dados_isolado["threshold"]
    with pytest.raises(ParametroInvalido, match="threshold"):
        parametros_de_dicionario(dados_isolado)


def test_n_neurons_deve_ser_inteiro(dados_isolado):
    dados_isolado["n_neurons"] = 1.5
    with pytest.raises(ParametroInvalido):
        parametros_de_dicionario(dados_isolado)


def test_forma_incompativel(dados_acoplado):
    dados_acoplado["population"] = ["E", "I", "E"]
    with pytest.raises(ParametroInvalido):
        parametros_de_dicionario(dados_acoplado)


def test_corrente_externa_exemplos():
    especificacao = EspecificacaoCorrente(termos=(
        (CorrenteConstante(2.0),),
        (CorrenteDegrau(1.0, 10.0, 20.0),),
        (CorrenteSenoidal(1.0, 4.0, 0.0),),
    ))
    assert corrente_externa_em(especificacao, 0, 123.4) == 2.0
    assert corrente_externa_em(especificacao, 1, 5.0) == 0.0
    assert corrente_externa_em(especificacao, 1, 15.0) == 1.0
    assert corrente_externa_em(especificacao, 2, 1.0) == pytest.approx(1.0, abs=1e-15)
    assert especificacao.i_mais == 2.0
    assert not especificacao.invariante_no_tempo


def test_corrente_externa_do_dicionario(dados_acoplado):
    dados_acoplado["external_current"] = [
        [{"kind": "constant", "value": 0.2}, {"kind": "step", "value": 0.1, "t_on": 0, "t_off": 5}],
        [{"kind": "sinusoid", "amplitude": 0.3, "period": 10.0}],
    ]
    p = parametros_de_dicionario(dados_acoplado)
    assert p.corrente_externa.i_mais == pytest.approx(0.3)
    assert p.corrente_externa.quebras(0) == (0.0, 5.0)


def test_termo_de_corrente_desconhecido(dados_isolado):
    dados_isolado["external_current"] = [[{"kind": "ramp", "value": 1.0}]]
    with pytest.raises(ParametroInvalido):
        parametros_de_dicionario(dados_isolado)


def test_alfa_mais_exponencial_soma_desde_zero(dados_isolado):
    dados_isolado["max_conductance"] = 1.0
    p = parametros_de_dicionario(dados_isolado)
    esperado = 1.0 / (1.0 - math.exp(-1.0))
    assert alfa_mais(p) == pytest.approx(esperado, rel=1e-12)
    assert esperado - 1.0 == pytest.approx(0.581977, abs=1e-6)

    tabela = derivar_limites(p)
    assert tabela.g_max[0] == pytest.approx(0.5 + esperado, rel=1e-12)
    assert tabela.tau_min[0] == pytest.approx(1.0 / (0.5 + esperado), rel=1e-12)


def test_sem_sinapses_g_max_igual_g_fuga(acoplado):
    p = acoplado.substituir(condutancia_maxima=np.zeros((2, 2)))
    tabela = derivar_limites(validar_parametros(p))
    np.testing.assert_allclose(tabela.g_max, p.condutancia_fuga)
    np.testing.assert_allclose(tabela.tau_min, tabela.tau_fuga)


def test_tabela_neuronio_isolado(isolado):
    tabela = limites_de(isolado)
    assert tabela.sigma_sup[0] == pytest.approx(1.0)
    assert tabela.sigma_inf[0] == pytest.approx(0.1)
    assert tabela.x_inf[0] == pytest.approx(1.0)
    assert tabela.x_sup[0] == pytest.approx(10.0)
    assert tabela.cap_inf[0] > 0.0
    assert tabela.cap_inf[0] <= tabela.cap_sup[0] <= 1.0
    assert tabela.log_m_p_inferior == pytest.approx(math.log(tabela.m_p_inferior), rel=1e-12)


def test_tabela_para_dataframe(acoplado):
    df = limites_de(acoplado).para_dataframe()
    assert list(df.columns) == ["quantity", "neuron", "value"]
    assert set(df["quantity"]) >= {"alpha_plus", "g_max", "v_lo", "v_hi", "cap_lo", "m_p_lower", "log_m_p_lower"}
    assert (df["quantity"] == "g_max").sum() == 2


@settings(max_examples=25, deadline=None)
@given(
    g01=st.floats(min_value=0.0, max_value=3.0),
    g10=st.floats(min_value=0.0, max_value=3.0),
    acrescimo=st.floats(min_value=0.0, max_value=2.0),
)
def test_limites_monotonos_em_g(g01, g10, acrescimo):
    base = ParametrosRede(
        n_neuronios=2, capacitancia=1.0, limiar=1.0, potencial_fuga=0.0, potencial_excitatorio=2.0,
        potencial_inibitorio=-1.0, condutancia_fuga=0.5, populacao=["E", "I"],
        condutancia_maxima=[[0.0, g01], [g10, 0.0]], tau_sinaptico=1.0,
    )
    maior = base.substituir(condutancia_maxima=[[0.0, g01 + acrescimo], [g10, 0.0]])
    a = derivar_limites(validar_parametros(base))
    b = derivar_limites(validar_parametros(maior))

    assert np.all(b.g_max >= a.g_max - 1e-12)
    assert np.all(b.v_inf <= a.v_inf + 1e-12)
    assert np.all(b.v_sup >= a.v_sup - 1e-12)
    assert b.log_m_p_inferior > -math.inf
    assert np.all(a.sigma_inf > 0.0) and np.all(a.sigma_inf <= a.sigma_sup)
    assert np.all(a.tau_min <= a.tau_fuga)
