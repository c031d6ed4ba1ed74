# src/core/raster.py

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, List, Optional, Tuple, Union

import numpy as np

from src.core.excecoes import EnumeracaoGrandeDemais, ErroRaster, PassadoIrresoluvel

MENOS_INFINITO = -math.inf
LIMITE_CONFIGURACOES = 2 ** 24

InstanteReset = Union[int, float]


class ConvencaoPassado(Enum):
    """Convenção para os instantes anteriores à janela do raster."""
    VAZIO = "empty"
    UNS = "allones"
    REPETIR = "repeat"


@dataclass(frozen=True, eq=False)
class Raster:
    """
    Bloco de padrões de disparo omega_k(n) numa janela [n0, n1] e a convenção do passado.

    Attributes:
        bits (np.ndarray): Matriz N x L de 0/1, bits[k, n - n0] = omega_k(n).
        n0 (int): Primeiro instante da janela.
        passado (ConvencaoPassado): Vazio (cauda de Omega_0), uns (cauda de Omega_1) ou repetição.
        bloco_repeticao (Optional[np.ndarray]): Bloco N x P repetido para trás (só para REPETIR);
            a última coluna corresponde ao instante n0 - 1.
    """
    bits: np.ndarray
    n0: int = 0
    passado: ConvencaoPassado = ConvencaoPassado.VAZIO
    bloco_repeticao: Optional[np.ndarray] = None

    def __post_init__(self):
        bits = np.asarray(self.bits)
        if bits.ndim != 2 or bits.shape[0] < 1 or bits.shape[1] < 1:
            raise ErroRaster(f"Raster precisa de N >= 1 neurônios e janela não vazia (forma {bits.shape}).")
        if not np.all((bits == 0) | (bits == 1)):
            raise ErroRaster("Os bits do raster devem ser 0 ou 1.")
        bits = bits.astype(np.uint8)
        bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "n0", int(self.n0))
        object.__setattr__(self, "passado", ConvencaoPassado(self.passado))

        if self.passado is ConvencaoPassado.REPETIR:
            bloco = np.asarray(self.bloco_repeticao)
            if bloco.ndim != 2 or bloco.shape[0] != bits.shape[0] or bloco.shape[1] < 1:
                raise ErroRaster("Convenção REPETIR exige um bloco N x P com P >= 1.")
            bloco = bloco.astype(np.uint8)
            bloco.flags.writeable = False
            object.__setattr__(self, "bloco_repeticao", bloco)

    # --- Construtores das configurações extremas ---

    @classmethod
    def omega_0(cls, n_neuronios: int, n0: int, n1: int) -> "Raster":
        """Raster sem nenhum disparo (Omega_0)."""
        return cls(np.zeros((n_neuronios, n1 - n0 + 1), dtype=np.uint8), n0, ConvencaoPassado.VAZIO)

    @classmethod
    def omega_1(cls, n_neuronios: int, n0: int, n1: int) -> "Raster":
        """Raster em que todos os neurônios disparam sempre (Omega_1)."""
        return cls(np.ones((n_neuronios, n1 - n0 + 1), dtype=np.uint8), n0, ConvencaoPassado.UNS)

    # --- Acesso ---

    @property
    def n_neuronios(self) -> int:
        return self.bits.shape[0]

    @property
    def comprimento(self) -> int:
        return self.bits.shape[1]

    @property
    def n1(self) -> int:
        return self.n0 + self.comprimento - 1

    def __eq__(self, outro) -> bool:
        if not isinstance(outro, Raster):
            return NotImplemented
        mesmo_bloco = (self.bloco_repeticao is None and outro.bloco_repeticao is None) or (
            self.bloco_repeticao is not None and outro.bloco_repeticao is not None
            and np.array_equal(self.bloco_repeticao, outro.bloco_repeticao)
        )
        return (self.n0 == outro.n0 and self.passado is outro.passado
                and np.array_equal(self.bits, outro.bits) and mesmo_bloco)

    __hash__ = None

    def colunas(self, n_inicio: int, n_fim: int) -> np.ndarray:
        """
        Bits dos instantes n_inicio..n_fim (inclusive), expandindo o passado se preciso.

        Raises:
            ErroRaster: Se n_fim estiver além do fim da janela.
        """
        if n_fim > self.n1:
            raise ErroRaster(f"Instante {n_fim} além do fim da janela [{self.n0}, {self.n1}].")
        if n_fim < n_inicio:
            return np.zeros((self.n_neuronios, 0), dtype=np.uint8)

        partes = []
        if n_inicio < self.n0:
            fim_passado = min(n_fim, self.n0 - 1)
            largura = fim_passado - n_inicio + 1
            if self.passado is ConvencaoPassado.VAZIO:
                partes.append(np.zeros((self.n_neuronios, largura), dtype=np.uint8))
            elif self.passado is ConvencaoPassado.UNS:
                partes.append(np.ones((self.n_neuronios, largura), dtype=np.uint8))
            else:
                periodo = self.bloco_repeticao.shape[1]
                indices = (np.arange(n_inicio, fim_passado + 1) - self.n0) % periodo
                partes.append(self.bloco_repeticao[:, indices])
        if n_fim >= self.n0:
            inicio = max(n_inicio, self.n0)
            partes.append(self.bits[:, inicio - self.n0:n_fim - self.n0 + 1])
        return np.concatenate(partes, axis=1) if len(partes) > 1 else partes[0]

    def bit(self, k: int, n: int) -> int:
        return int(self.colunas(n, n)[k, 0])

    def tem_disparos_antes(self, corte: int) -> bool:
        """Indica se existe algum disparo em instantes < corte (passado incluso)."""
        if self.passado is not ConvencaoPassado.VAZIO:
            if self.passado is ConvencaoPassado.UNS or np.any(self.bloco_repeticao):
                return True
        if corte <= self.n0:
            return False
        return bool(np.any(self.bits[:, :min(corte, self.n1 + 1) - self.n0]))

    def recortar(self, n_fim: int) -> "Raster":
        """Mesmo raster com a janela terminando em n_fim (n0 <= n_fim <= n1)."""
        if not (self.n0 <= n_fim <= self.n1):
            raise ErroRaster(f"Recorte em {n_fim} fora da janela [{self.n0}, {self.n1}].")
        return Raster(self.bits[:, :n_fim - self.n0 + 1], self.n0, self.passado, self.bloco_repeticao)

    def acrescentar(self, padrao: np.ndarray) -> "Raster":
        """Novo raster com o padrão omega(n1 + 1) acrescentado ao fim da janela."""
        coluna = np.asarray(padrao, dtype=np.uint8).reshape(self.n_neuronios, 1)
        return Raster(np.concatenate([self.bits, coluna], axis=1), self.n0, self.passado, self.bloco_repeticao)


# --- Tempos de disparo e último reset ---

def intervalo_de_disparo(t: float, horizonte: int) -> Tuple[int, int]:
    """Instantes inteiros n com floor(t) - horizonte <= n < t."""
    return math.floor(t) - int(horizonte), math.ceil(t) - 1


def tempos_de_disparo_array(raster: Raster, j: int, antes: float, horizonte: int) -> np.ndarray:
    inicio, fim = intervalo_de_disparo(antes, horizonte)
    if fim < inicio:
        return np.zeros(0, dtype=np.int64)
    linha = raster.colunas(inicio, fim)[j]
    return inicio + np.flatnonzero(linha)


def tempos_de_disparo(raster: Raster, j: int, antes: float, horizonte: int) -> List[int]:
    """
    Lista ordenada dos instantes de disparo do neurônio j (spike_times).

    Args:
        raster (Raster): O raster.
        j (int): Neurônio.
        antes (float): Instante t; só entram disparos n < t.
        horizonte (int): Profundidade máxima abaixo de floor(t).

    Returns:
        List[int]: Instantes estritamente crescentes.
    """
    return [int(n) for n in tempos_de_disparo_array(raster, j, antes, horizonte)]


def ultimo_reset(raster: Raster, k: int, n: int, profundidade_max: Optional[int] = None) -> InstanteReset:
    """
    Último instante m <= n em que o neurônio k disparou (last_reset).

    Args:
        raster (Raster): O raster.
        k (int): Neurônio.
        n (int): Instante de consulta (pode ser n1; um disparo em n conta).
        profundidade_max (Optional[int]): Profundidade máxima de expansão do passado REPETIR.

    Returns:
        InstanteReset: Inteiro, ou MENOS_INFINITO se nunca disparou.

    Raises:
        PassadoIrresoluvel: Se a resposta exigir expandir o passado além de profundidade_max.
    """
    if n > raster.n1:
        raise ErroRaster(f"Instante {n} além do fim da janela [{raster.n0}, {raster.n1}].")

    # 1. Dentro da janela
    if n >= raster.n0:
        disparos = np.flatnonzero(raster.bits[k, :n - raster.n0 + 1])
        if disparos.size > 0:
            return raster.n0 + int(disparos[-1])

    # 2. No passado
    ultimo_passado = min(n, raster.n0 - 1)
    if raster.passado is ConvencaoPassado.VAZIO:
        return MENOS_INFINITO
    if raster.passado is ConvencaoPassado.UNS:
        return ultimo_passado

    bloco = raster.bloco_repeticao[k]
    if not np.any(bloco):
        return MENOS_INFINITO
    periodo = bloco.size
    deslocamentos = (ultimo_passado - np.arange(periodo) - raster.n0) % periodo
    distancia = int(np.flatnonzero(bloco[deslocamentos])[0])
    if profundidade_max is not None and n - (ultimo_passado - distancia) > profundidade_max:
        raise PassadoIrresoluvel(
            f"Último reset do neurônio {k} em {n} exige profundidade além de {profundidade_max}."
        )
    return ultimo_passado - distancia


# --- Enumeração de cilindros ---

def decodificar_bloco(codigo: int, n_neuronios: int, largura: int) -> np.ndarray:
    """Bloco N x largura cujo bit (coluna c, neurônio k) é o bit c*N + k do código."""
    posicoes = np.arange(n_neuronios * largura)
    bits = (codigo >> posicoes) & 1
    return bits.reshape(largura, n_neuronios).T.astype(np.uint8)


@dataclass(frozen=True)
class Cauda:
    """Prefixo de um cilindro: bits explícitos na cauda e convenção além dela."""
    bits: np.ndarray
    passado: ConvencaoPassado
    extrema: bool = False


def caudas_explicitas(n_neuronios: int, horizonte_cauda: int) -> List[Cauda]:
    return [Cauda(decodificar_bloco(c, n_neuronios, horizonte_cauda), ConvencaoPassado.VAZIO)
            for c in range(2 ** (n_neuronios * horizonte_cauda))]


def caudas_extremas(n_neuronios: int, horizonte_cauda: int) -> Tuple[Cauda, Cauda]:
    """Prefixos de Omega_0 e de Omega_1."""
    zeros = np.zeros((n_neuronios, horizonte_cauda), dtype=np.uint8)
    uns = np.ones((n_neuronios, horizonte_cauda), dtype=np.uint8)
    return (Cauda(zeros, ConvencaoPassado.VAZIO, True), Cauda(uns, ConvencaoPassado.UNS, True))


def pares_por_bloco(n_neuronios: int, horizonte_cauda: int) -> int:
    explicitas = 2 ** (n_neuronios * horizonte_cauda) if horizonte_cauda > 0 else 0
    return explicitas ** 2 + 2


def contar_configuracoes(n_neuronios: int, m: int, horizonte_cauda: int) -> int:
    return 2 ** (n_neuronios * (m + 1)) * pares_por_bloco(n_neuronios, horizonte_cauda)


def montar_raster_cilindro(bloco: np.ndarray, cauda: Cauda, n: int) -> Raster:
    """Raster com janela [n - m - H, n]: cauda seguida do bloco de concordância."""
    bits = np.concatenate([cauda.bits, bloco], axis=1)
    return Raster(bits, n - bits.shape[1] + 1, cauda.passado)


def pares_de_cilindro(n: int, m: int, horizonte_cauda: int, n_neuronios: int) -> Iterator[Tuple[Raster, Raster]]:
    """
    Enumera pares de rasters que coincidem nos instantes n-m..n (cylinder_pairs).

    Para cada bloco de concordância, gera todos os pares ordenados de caudas
    explícitas em n-m-H..n-m-1 (passado vazio além delas) e os dois pares
    extremos (prefixo de Omega_0 contra prefixo de Omega_1, nos dois sentidos).

    Raises:
        EnumeracaoGrandeDemais: Se o número de configurações passar de 2^24.
    """
    contagem = contar_configuracoes(n_neuronios, m, horizonte_cauda)
    if contagem > LIMITE_CONFIGURACOES:
        raise EnumeracaoGrandeDemais(contagem, LIMITE_CONFIGURACOES)

    explicitas = caudas_explicitas(n_neuronios, horizonte_cauda) if horizonte_cauda > 0 else []
    cauda_zero, cauda_um = caudas_extremas(n_neuronios, horizonte_cauda)
    for codigo in range(2 ** (n_neuronios * (m + 1))):
        bloco = decodificar_bloco(codigo, n_neuronios, m + 1)
        for a in explicitas:
            for b in explicitas:
                yield montar_raster_cilindro(bloco, a, n), montar_raster_cilindro(bloco, b, n)
        zero = montar_raster_cilindro(bloco, cauda_zero, n)
        um = montar_raster_cilindro(bloco, cauda_um, n)
        yield zero, um
        yield um, zero
