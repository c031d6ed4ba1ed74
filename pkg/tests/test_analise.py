import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from src.core.analise import (
    _planejar_blocos, binarizar_raster, erro_markov, erros_markov, erros_para_dataframe, estatisticas_empiricas,
    expandir_monomios, horizonte_calibrado, limites_silencio, medir_variacao, medir_variacoes,
    potencial_truncado_tabela, reconstruir, relatorios_para_dataframe, verificar_intervalo_silencioso
)
from src.core.dinamica import horizonte_historico
from src.core.excecoes import EnumeracaoGrandeDemais, ErroRaster, JanelaIncompativel
from src.core.kernel import cauda_gaussiana, lei_truncada, probabilidade_bloco, simular
from src.core.limites_variacao import Grandeza, limite_trivial, limite_variacao
from src.core.parametros import limites_de
from src.core.raster import ConvencaoPassado, Raster, decodificar_bloco


# --- Limites de variação ---

@settings(max_examples=20, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(grandeza=st.sampled_from(list(Grandeza)), m=st.integers(min_value=0, max_value=60))
def test_limite_variacao_decrescente_e_limitado(acoplado, grandeza, m):
    atual = limite_variacao(acoplado, grandeza, m)
    assert 0.0 <= atual <= limite_trivial(acoplado, grandeza)
    assert limite_variacao(acoplado, grandeza, m + 1) <= atual + 1e-15
    assert atual <= limite_variacao(acoplado, grandeza, m, limitar=False)


def test_limite_variacao_m_negativo(acoplado):
    with pytest.raises(ValueError):
        limite_variacao(acoplado, Grandeza.KERNEL, -1)


# --- Variação medida ---

def test_variacao_neuronio_isolado(isolado):
    relatorios = medir_variacoes(isolado, 1, 1)
    assert [r.grandeza for r in relatorios] == list(Grandeza)
    for r in relatorios:
        assert r.modo_enumeracao == "exhaustive"
        assert r.respeita_limite, r
    condutancia = next(r for r in relatorios if r.grandeza is Grandeza.CONDUTANCIA)
    assert condutancia.medido_inferior == 0.0


def test_variacao_rede_acoplada(acoplado):
    relatorios = medir_variacoes(acoplado, 1, 1)
    df = relatorios_para_dataframe(relatorios)
    assert list(df.columns) == ["quantity", "m", "measured", "bound", "bound_formula", "mode", "holds"]
    assert df["holds"].all()
    kernel = medir_variacao(acoplado, Grandeza.KERNEL, 1, 1)
    assert 0.0 < kernel.medido_inferior <= 1.0


def test_variacao_do_kernel_diminui_com_m(acoplado):
    rasos = medir_variacao(acoplado, "kernel", 0, 0).medido_inferior
    fundo = medir_variacao(acoplado, "kernel", 6, 0).medido_inferior
    assert fundo < rasos


@pytest.mark.parametrize("m", range(9))
def test_variacao_isolado_respeita_limites_ate_m_8(isolado, m):
    for r in medir_variacoes(isolado, m, 4):
        assert r.modo_enumeracao == "exhaustive"
        assert r.respeita_limite, r


@pytest.mark.parametrize("m", range(9))
def test_variacao_acoplado_respeita_limites_ate_m_8(acoplado, m):
    for r in medir_variacoes(acoplado, m, 2, modo="structured"):
        assert r.respeita_limite, r


@pytest.mark.parametrize("nome", ["isolado", "acoplado"])
def test_limite_do_kernel_decai_exponencialmente(request, nome):
    parametros = request.getfixturevalue(nome)
    tau = max(float(np.max(parametros.tau_sinaptico)), float(np.max(limites_de(parametros).tau_fuga)))
    raso = limite_variacao(parametros, Grandeza.KERNEL, 2, limitar=False)
    fundo = limite_variacao(parametros, Grandeza.KERNEL, 8, limitar=False)
    # perfil exponencial: fator polinomial constante
    assert fundo <= raso * math.exp(-6.0 / tau) * (1.0 + 1e-12)


def test_planejamento_dos_blocos():
    blocos, modo = _planejar_blocos(1, 1, 1)
    assert modo == "exhaustive" and len(blocos) == 4
    blocos, modo = _planejar_blocos(2, 10, 0)
    assert modo == "structured" and len(blocos) == 16
    blocos, modo = _planejar_blocos(2, 0, 0)
    assert len(blocos) == 4
    with pytest.raises(EnumeracaoGrandeDemais):
        _planejar_blocos(6, 10, 3)
    blocos, modo = _planejar_blocos(1, 1, 1, "structured")
    assert modo == "structured" and len(blocos) == 4
    with pytest.raises(EnumeracaoGrandeDemais):
        _planejar_blocos(2, 10, 0, "exhaustive")
    with pytest.raises(ValueError):
        _planejar_blocos(1, 1, 1, "amostral")


# --- Erro markoviano ---

def test_erro_markov_profundo_e_pequeno(isolado):
    erros = erros_markov(isolado, [0, 1, 40], n_sondas=4, horizonte_cauda=2, semente=5)
    assert [e.profundidade for e in erros] == [0, 1, 40]
    assert erros[-1].max_tv < 1e-6
    assert erros[0].max_tv > erros[-1].max_tv
    for e in erros:
        assert e.mean_kl >= 0.0
        # 4 aleatórias + contextos vazio/cheio x caudas vazia/cheia/disparo único
        assert 4 < e.n_sondas <= 4 + 6
    assert erros[1].max_tv <= limite_variacao(isolado, Grandeza.KERNEL, 0) + 1e-8
    assert list(erros_para_dataframe(erros).columns) == ["D", "max_tv", "mean_kl"]


def test_erro_markov_uma_profundidade(acoplado):
    erro = erro_markov(acoplado, 2, n_sondas=3, horizonte_cauda=1, semente=0)
    assert 0.0 <= erro.max_tv <= 1.0


def test_erro_markov_enxerga_a_truncagem_no_neuronio_isolado(isolado):
    erros = erros_markov(isolado, range(9), n_sondas=4, horizonte_cauda=2, semente=0)
    max_tv = np.array([e.max_tv for e in erros])
    # um disparo em -D-1 fora do contexto sempre muda a lei
    assert np.all(max_tv > 0.0)
    assert np.all(np.diff(max_tv) <= 1e-10)
    for e in erros[1:]:
        assert e.max_tv <= limite_variacao(isolado, Grandeza.KERNEL, e.profundidade - 1) + 1e-8


def test_erro_markov_monotono_na_rede_acoplada(acoplado):
    erros = erros_markov(acoplado, range(9), n_sondas=3, horizonte_cauda=2, semente=0)
    max_tv = np.array([e.max_tv for e in erros])
    assert max_tv[0] > 0.0
    assert np.all(np.diff(max_tv) <= 1e-10)


# --- Horizonte histórico: analítico e calibrado ---

@pytest.mark.parametrize("nome", ["isolado", "acoplado"])
def test_horizonte_analitico_e_conservador(request, nome):
    parametros = request.getfixturevalue(nome)
    h = horizonte_historico(parametros, 1e-6)
    medido = medir_variacao(parametros, Grandeza.KERNEL, h, 1, modo="structured").medido_inferior
    assert medido < 1e-6
    assert erro_markov(parametros, h + 1, n_sondas=2, horizonte_cauda=1, semente=0).max_tv < 1e-6
    calibrado = horizonte_calibrado(parametros, 1e-6, horizonte_cauda=1)
    assert calibrado <= h


def test_horizonte_calibrado_neuronio_isolado(isolado):
    eps = 1e-6
    h = horizonte_calibrado(isolado, eps)
    assert 10 <= h <= 12
    assert medir_variacao(isolado, Grandeza.KERNEL, h, 2, modo="structured").medido_inferior < eps
    assert medir_variacao(isolado, Grandeza.KERNEL, h - 1, 2, modo="structured").medido_inferior >= eps

    # a lei truncada em D = m + 1 cruza eps junto com a variação em m
    erros = erros_markov(isolado, range(h + 3), n_sondas=2, horizonte_cauda=2, semente=0)
    primeiro = next(e.profundidade for e in erros if e.max_tv < eps)
    assert abs(primeiro - (h + 1)) <= 1


def test_horizonte_calibrado_rejeita_eps_invalido(isolado):
    with pytest.raises(ValueError):
        horizonte_calibrado(isolado, 0.0)
    assert horizonte_calibrado(isolado, 2.0) == 0


# --- Monômios ---

def test_monomios_profundidade_zero_bernoulli(isolado):
    expansao = expandir_monomios(isolado, 0)
    p = float(lei_truncada(isolado, 0, np.zeros((1, 0))).p_disparo[0])
    assert expansao.constante == pytest.approx(math.log(1.0 - p), rel=1e-12)
    assert expansao.coeficiente([(0, 0)]) == pytest.approx(math.log(p / (1.0 - p)), rel=1e-12)
    df = expansao.para_dataframe()
    assert list(df["indices"]) == ["", "0:0"]


def test_monomios_reconstroem_o_potencial(acoplado):
    expansao = expandir_monomios(acoplado, 1)
    tabela = potencial_truncado_tabela(acoplado, 1)
    np.testing.assert_allclose(reconstruir(expansao), tabela, rtol=1e-12, atol=1e-12)
    bloco = np.array([[1, 0], [1, 1]])
    # bit (n + D) N + k: (0,-1)->0, (1,-1)->1, (1,0)->3
    assert reconstruir(expansao, bloco) == pytest.approx(tabela[0b1011], rel=1e-12)
    assert expansao.fatores(0b1011) == [(0, -1), (1, -1), (1, 0)]
    assert expansao.indice([(1, 0), (0, -1), (1, -1)]) == 0b1011


@pytest.mark.parametrize("profundidade", [0, 2])
def test_monomios_sem_interacao_no_instante_zero(acoplado, profundidade):
    expansao = expandir_monomios(acoplado, profundidade)
    tabela = potencial_truncado_tabela(acoplado, profundidade)
    assert np.max(np.abs(reconstruir(expansao) - tabela)) < 1e-10
    for indice, coeficiente in enumerate(expansao.coeficientes):
        fatores = expansao.fatores(indice)
        # os neurônios disparam independentemente dado o passado
        if sum(1 for _, n in fatores if n == 0) >= 2:
            assert abs(coeficiente) < 1e-9
        if profundidade == 0 and len(fatores) > 1:
            assert abs(coeficiente) < 1e-9


def test_monomios_grandes_demais(acoplado):
    with pytest.raises(EnumeracaoGrandeDemais):
        expandir_monomios(acoplado, 10)


# --- Intervalos de silêncio ---

def test_limites_de_silencio(acoplado):
    lim = limites_de(acoplado)
    inferior, superior = limites_silencio(acoplado, 1, 3)
    assert inferior == pytest.approx(float(np.prod(lim.cap_inf)) ** 3)
    assert superior == pytest.approx(float(lim.cap_sup[1]) ** 3)
    assert limites_silencio(acoplado, 0, 0) == (1.0, 1.0)


@pytest.mark.parametrize("t0", [1, 2, 3, 5])
def test_intervalo_silencioso_neuronio_isolado(isolado, t0):
    resultado = verificar_intervalo_silencioso(isolado, 0, t0, ensaios=300, semente=t0)
    assert resultado.dentro
    # sem disparos anteriores, o silêncio de t0 passos tem probabilidade (1 - pi(1))^t0
    esperado = (1.0 - cauda_gaussiana(1.0)) ** t0
    assert abs(resultado.empirico - esperado) <= 4.0 * resultado.erro_padrao


@pytest.mark.parametrize("k, t0", [(0, 1), (1, 2), (0, 5)])
def test_intervalo_silencioso_rede_acoplada(acoplado, k, t0):
    resultado = verificar_intervalo_silencioso(acoplado, k, t0, ensaios=200, semente=k + 10 * t0)
    assert resultado.inferior <= resultado.superior
    assert resultado.dentro


def test_frequencia_de_blocos_segue_as_transicoes_encadeadas(isolado):
    ensaios = 2000
    rasters = simular(isolado, 3, ensaios, semente=21, horizonte=40)
    total = 0.0
    for codigo in range(8):
        bloco = decodificar_bloco(codigo, 1, 3)
        exato = probabilidade_bloco(isolado, Raster(bloco, 0), 0, 2, 40)
        empirico = np.mean([np.array_equal(r.bits, bloco) for r in rasters])
        erro = math.sqrt(max(exato * (1.0 - exato), 1e-12) / ensaios)
        assert abs(empirico - exato) <= 4.0 * erro + 1e-12
        total += exato
    assert total == pytest.approx(1.0, abs=1e-12)


def test_intervalo_silencioso_t0_zero(isolado):
    resultado = verificar_intervalo_silencioso(isolado, 0, 0, ensaios=10, semente=0)
    assert resultado.empirico == 1.0 and resultado.dentro
    with pytest.raises(ValueError):
        verificar_intervalo_silencioso(isolado, 3, 2, ensaios=10, semente=0)


# --- Estatísticas e binarização ---

def test_estatisticas_empiricas():
    rasters = [Raster(np.array([[1, 1, 0, 0]])), Raster(np.array([[0, 1, 1, 0]]))]
    est = estatisticas_empiricas(rasters, defasagem_max=1, largura_bloco=2)
    assert est.taxas[0] == pytest.approx(0.5)
    assert est.pares[0, 0, 0] == pytest.approx(0.25)
    assert est.pares[0, 0, 1] == pytest.approx(2.0 / 6.0 - 0.25)
    assert est.blocos[1][1] == pytest.approx(0.5)
    # largura 2, código omega(n) + 2 omega(n + 1): 3, 1, 0 e 2, 3, 1
    np.testing.assert_allclose(est.blocos[2], [1 / 6, 2 / 6, 1 / 6, 2 / 6])
    assert est.amostras_blocos[2] == 6
    df = est.para_dataframe()
    assert set(df["estimator"]) == {"rate", "pairwise", "block"}


def test_estatisticas_exigem_mesma_janela():
    with pytest.raises(JanelaIncompativel):
        estatisticas_empiricas([Raster(np.zeros((1, 4))), Raster(np.zeros((1, 5)))])
    with pytest.raises(JanelaIncompativel):
        estatisticas_empiricas([])


def test_binarizar_exemplo():
    raster = Raster(np.array([[0, 1, 0, 0, 1, 0]]))
    binario = binarizar_raster(raster, 3)
    np.testing.assert_array_equal(binario.bits, [[1, 1]])
    assert binario.n0 == 0
    assert binarizar_raster(raster, 1) is raster


def test_binarizar_janelas_e_passado():
    raster = Raster(np.array([[0, 0, 1, 0, 0, 0, 1]]), -6, ConvencaoPassado.UNS)
    binario = binarizar_raster(raster, 3)
    assert binario.n0 == -2 and binario.comprimento == 2
    assert binario.passado is ConvencaoPassado.UNS
    with pytest.raises(ErroRaster):
        binarizar_raster(raster, 10)
    repetido = Raster(np.zeros((1, 4)), 0, ConvencaoPassado.REPETIR, np.array([[1, 0]]))
    with pytest.raises(ErroRaster):
        binarizar_raster(repetido, 3)
    assert binarizar_raster(repetido, 2).bloco_repeticao.tolist() == [[1]]
