import logging
import math
from functools import lru_cache
from typing import Callable, Iterable, Tuple

import numpy as np

from src.core.excecoes import QuadraturaNaoConvergente


@lru_cache(maxsize=32)
def nos_gauss_legendre(n_nos: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nós e pesos de Gauss-Legendre no intervalo [-1, 1].

    Args:
        n_nos (int): Número de nós da regra.

    Returns:
        Tuple[np.ndarray, np.ndarray]: (nós, pesos), somente leitura.
    """
    nos, pesos = np.polynomial.legendre.leggauss(n_nos)
    nos.flags.writeable = False
    pesos.flags.writeable = False
    return nos, pesos


def pontos_de_quebra(limite_inferior: float, limite_superior: float, extras: Iterable[float] = ()) -> np.ndarray:
    """
    Partição de [a, b] nos inteiros interiores e nos pontos extras fornecidos.

    Os integrandos da dinâmica são suaves entre instantes inteiros de disparo
    e apresentam quinas neles.
    """
    inteiros = np.arange(math.floor(limite_inferior) + 1, math.ceil(limite_superior), dtype=float)
    extras = [x for x in extras if limite_inferior < x < limite_superior]
    pontos = np.concatenate(([limite_inferior], inteiros, extras, [limite_superior]))
    return np.unique(pontos)


def _regra_composta(funcao: Callable, quebras: np.ndarray, subdivisoes: int, n_nos: int) -> Tuple[float, float]:
    nos, pesos = nos_gauss_legendre(n_nos)
    larguras = np.diff(quebras) / subdivisoes
    esquerdas = (quebras[:-1, None] + larguras[:, None] * np.arange(subdivisoes)[None, :]).ravel()
    h = np.repeat(larguras, subdivisoes)

    pontos = esquerdas[:, None] + 0.5 * (nos[None, :] + 1.0) * h[:, None]
    w = 0.5 * pesos[None, :] * h[:, None]
    valores = np.asarray(funcao(pontos.ravel()), dtype=float).reshape(pontos.shape)
    return float(np.sum(w * valores)), float(np.sum(w * np.abs(valores)))


def integrar(
    funcao_a_integrar: Callable,
    limite_inferior: float,
    limite_superior: float,
    tol_rel: float = 1e-9,
    nos_por_unidade: int = 8,
    limite_refinamento: int = 6,
    quebras_extras: Iterable[float] = ()
) -> float:
    """
    Calcula a integral definida por Gauss-Legendre composto.

    O intervalo é dividido nos inteiros (e nos pontos extras), cada trecho
    recebe `nos_por_unidade` nós, e o resultado é certificado comparando a
    regra com a mesma regra em trechos divididos ao meio. A divisão continua
    até a diferença ficar abaixo de `tol_rel` vezes a integral do módulo.

    Args:
        funcao_a_integrar (Callable): Função vetorizada (recebe um array numpy).
        limite_inferior (float): Limite inferior.
        limite_superior (float): Limite superior.
        tol_rel (float): Tolerância relativa.
        nos_por_unidade (int): Nós de Gauss por trecho unitário.
        limite_refinamento (int): Número máximo de divisões ao meio.
        quebras_extras (Iterable[float]): Descontinuidades adicionais (ex.: degraus de corrente).

    Returns:
        float: O valor da integral.

    Raises:
        QuadraturaNaoConvergente: Se a tolerância não for atingida no limite de refinamento.
    """
    if limite_inferior >= limite_superior:
        return 0.0

    quebras = pontos_de_quebra(limite_inferior, limite_superior, quebras_extras)
    anterior, _ = _regra_composta(funcao_a_integrar, quebras, 1, nos_por_unidade)

    for nivel in range(1, limite_refinamento + 1):
        atual, escala = _regra_composta(funcao_a_integrar, quebras, 2 ** nivel, nos_por_unidade)
        if abs(atual - anterior) <= tol_rel * escala:
            return atual
        logging.debug(f"Quadratura em [{limite_inferior}, {limite_superior}]: nível {nivel}, "
                      f"diferença {abs(atual - anterior):.3e}")
        anterior = atual

    raise QuadraturaNaoConvergente(
        f"Integral em [{limite_inferior}, {limite_superior}] não atingiu tol_rel={tol_rel} "
        f"após {limite_refinamento} refinamentos."
    )
