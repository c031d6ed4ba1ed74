import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.core.excecoes import EnumeracaoGrandeDemais, ErroRaster, PassadoIrresoluvel
from src.core.raster import (
    MENOS_INFINITO, ConvencaoPassado, Raster, contar_configuracoes, decodificar_bloco, pares_de_cilindro,
    tempos_de_disparo, ultimo_reset
)


def raster_de_texto(texto: str, n0: int = 0, passado=ConvencaoPassado.VAZIO) -> Raster:
    linhas = [[int(c) for c in linha] for linha in texto.split()]
    return Raster(np.array(linhas, dtype=np.uint8), n0, passado)


def test_bits_invalidos():
    with pytest.raises(ErroRaster):
        Raster(np.array([[0, 2, 1]]))
    with pytest.raises(ErroRaster):
        Raster(np.zeros((1, 0)))


def test_omega_1_antes_da_janela():
    raster = Raster.omega_1(2, 0, 3)
    assert tempos_de_disparo(raster, 0, 2.5, 4) == [-2, -1, 0, 1, 2]


def test_tempos_de_disparo_estritamente_antes():
    raster = raster_de_texto("010010")
    assert tempos_de_disparo(raster, 0, 5, 10) == [1, 4]
    assert tempos_de_disparo(raster, 0, 4, 10) == [1]
    assert tempos_de_disparo(raster, 0, 4.5, 10) == [1, 4]
    # só instantes >= floor(t) - horizonte
    assert tempos_de_disparo(raster, 0, 5, 2) == [4]


def test_ultimo_reset():
    raster = raster_de_texto("010010")
    assert ultimo_reset(raster, 0, 5) == 4
    assert ultimo_reset(raster, 0, 4) == 4
    assert ultimo_reset(raster, 0, 3) == 1
    assert ultimo_reset(raster, 0, 0) == MENOS_INFINITO
    assert ultimo_reset(Raster.omega_1(1, 0, 2), 0, 0) == 0
    assert ultimo_reset(Raster.omega_0(1, 0, 2), 0, 2) == MENOS_INFINITO
    with pytest.raises(ErroRaster):
        ultimo_reset(raster, 0, 6)


def test_ultimo_reset_no_passado_uns():
    raster = raster_de_texto("000", n0=5, passado=ConvencaoPassado.UNS)
    assert ultimo_reset(raster, 0, 7) == 4


def test_passado_repetido():
    bloco = np.array([[1, 0, 0]], dtype=np.uint8)
    raster = Raster(np.zeros((1, 2), dtype=np.uint8), 0, ConvencaoPassado.REPETIR, bloco)
    # o bloco termina em -1: instantes -3, -2, -1 recebem 1, 0, 0
    np.testing.assert_array_equal(raster.colunas(-6, -1)[0], [1, 0, 0, 1, 0, 0])
    assert ultimo_reset(raster, 0, 1) == -3
    with pytest.raises(PassadoIrresoluvel):
        ultimo_reset(raster, 0, 1, profundidade_max=2)


def test_repetir_exige_bloco():
    with pytest.raises(ErroRaster):
        Raster(np.zeros((1, 2)), 0, ConvencaoPassado.REPETIR)


def test_recortar_e_acrescentar():
    raster = raster_de_texto("0101 1100", n0=-2)
    assert raster.n1 == 1
    recorte = raster.recortar(0)
    assert recorte.comprimento == 3
    estendido = raster.acrescentar([1, 0])
    assert estendido.n1 == 2 and estendido.bit(0, 2) == 1 and estendido.bit(1, 2) == 0
    with pytest.raises(ErroRaster):
        raster.recortar(5)


def test_decodificar_bloco():
    bloco = decodificar_bloco(0b0110, 2, 2)
    # bit c N + k: coluna 0 = bits 0,1; coluna 1 = bits 2,3
    np.testing.assert_array_equal(bloco, [[0, 1], [1, 0]])


def test_contagem_de_pares_de_cilindro():
    pares = list(pares_de_cilindro(0, 1, 1, 1))
    assert len(pares) == 4 * 6 == contar_configuracoes(1, 1, 1)
    for a, b in pares:
        assert a.n1 == b.n1 == 0
        np.testing.assert_array_equal(a.colunas(-1, 0), b.colunas(-1, 0))


def test_pares_de_cilindro_sem_cauda_explicita():
    pares = list(pares_de_cilindro(3, 0, 0, 2))
    assert len(pares) == 4 * 2
    passados = {(a.passado, b.passado) for a, b in pares}
    assert passados == {(ConvencaoPassado.VAZIO, ConvencaoPassado.UNS), (ConvencaoPassado.UNS, ConvencaoPassado.VAZIO)}


def test_enumeracao_grande_demais():
    with pytest.raises(EnumeracaoGrandeDemais) as erro:
        next(pares_de_cilindro(0, 5, 3, 3))
    assert erro.value.contagem > erro.value.limite


@settings(max_examples=50, deadline=None)
@given(
    bits=st.lists(st.integers(min_value=0, max_value=1), min_size=1, max_size=30),
    t=st.floats(min_value=-5.0, max_value=40.0),
    horizonte=st.integers(min_value=0, max_value=40),
)
def test_tempos_de_disparo_no_intervalo(bits, t, horizonte):
    raster = Raster(np.array([bits], dtype=np.uint8), 0)
    t = min(t, float(len(bits)))
    tempos = tempos_de_disparo(raster, 0, t, horizonte)
    assert tempos == sorted(set(tempos))
    for n in tempos:
        assert np.floor(t) - horizonte <= n < t
        assert raster.bit(0, n) == 1
