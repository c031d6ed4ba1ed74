# src/core/limites_variacao.py

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from src.core.parametros import ParametrosValidados, limites_de
from src.core.perfis import polinomio_cauda, somar_serie

INV_RAIZ_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class Grandeza(Enum):
    """Grandezas cuja m-variação é medida e limitada."""
    CONDUTANCIA = "conductance"
    V_SINAPTICO = "vsyn"
    V_EXTERNO = "vext"
    VARIANCIA = "sigma_sq"
    KERNEL = "kernel"


@dataclass(frozen=True, eq=False)
class ConstantesVariacao:
    """
    Constantes dos limites de m-variação.

    Matrizes N x N multiplicam o fator de cauda P_d(m/tau_kj) e^{-m/tau_kj};
    vetores de comprimento N multiplicam e^{-m/tau_L,k} (B) ou e^{-2m/tau_L,k} (C).
    """
    a_sin: np.ndarray
    b_sin: np.ndarray
    a_ext: np.ndarray
    b_ext: np.ndarray
    a_sigma: np.ndarray
    c_sigma: np.ndarray
    a_x: np.ndarray
    b_x: np.ndarray
    c_x: np.ndarray


@lru_cache(maxsize=32)
def constantes_variacao(parametros: ParametrosValidados) -> ConstantesVariacao:
    """
    Monta as constantes a partir da tabela de limites.

    O termo cruzado de A^(syn) usa o fator 2 que aparece ao limitar a
    variação de Gamma pela variação da condutância (2 sum_j G_kj P_d e^{-m/tau}).
    Na montagem de A^(X), C^(X), a variação de sigma é limitada por
    var[sigma^2] / (2 sigma-), e o fator |theta - V| / sigma-^2 dá 1 / (2 sigma-^3).
    """
    p = parametros
    lim = limites_de(p)
    g_fuga = p.condutancia_fuga[:, None]
    g_rel = p.condutancia_maxima / g_fuga
    soma_pesos = np.abs(p.pesos_sinapticos).sum(axis=1)

    # 1. Potencial sináptico
    a_sin = (2.0 * np.abs(p.pesos_sinapticos) + 2.0 * lim.alfa_mais * g_rel * soma_pesos[:, None]) / g_fuga
    b_sin = lim.alfa_mais / p.condutancia_fuga * soma_pesos

    # 2. Fuga e corrente externa
    b_ext = abs(p.potencial_fuga) + lim.i_mais / p.condutancia_fuga
    a_ext = 2.0 * g_rel * b_ext[:, None]

    # 3. Variância condicional
    escala_ruido = (p.amplitude_ruido * np.sqrt(lim.tau_fuga) / p.capacitancia) ** 2
    a_sigma = g_rel * escala_ruido[:, None]
    c_sigma = 0.5 * escala_ruido + 2.0 * p.desvio_reset ** 2

    # 4. Variável X_k = (theta - V_det) / sigma_k
    sigma = lim.sigma_inf
    amplitude = np.maximum(np.abs(p.limiar - lim.v_inf), np.abs(p.limiar - lim.v_sup))
    fator_sigma = amplitude / (2.0 * sigma ** 3)
    a_x = (a_sin + a_ext) / sigma[:, None] + fator_sigma[:, None] * a_sigma
    b_x = (b_sin + b_ext) / sigma
    c_x = fator_sigma * c_sigma

    return ConstantesVariacao(a_sin=a_sin, b_sin=b_sin, a_ext=a_ext, b_ext=b_ext, a_sigma=a_sigma,
                              c_sigma=c_sigma, a_x=a_x, b_x=b_x, c_x=c_x)


def fator_cauda(parametros: ParametrosValidados, m: float) -> np.ndarray:
    """Matriz P_d(m/tau_kj) e^{-m/tau_kj} (zero onde não há sinapse)."""
    tau = parametros.tau_sinaptico
    y = m / tau
    fator = polinomio_cauda(y, tau, parametros.grau) * np.exp(-y)
    return np.where(parametros.sinapses, fator, 0.0)


def limite_trivial(parametros: ParametrosValidados, grandeza: Grandeza) -> float:
    """Amplitude máxima da grandeza, que limita a variação para qualquer m."""
    p = parametros
    lim = limites_de(p)
    if grandeza is Grandeza.CONDUTANCIA:
        return float(np.max(lim.alfa_mais * p.condutancia_maxima.sum(axis=1)))
    if grandeza is Grandeza.V_SINAPTICO:
        return float(np.max(lim.alfa_mais / p.condutancia_fuga * np.abs(p.pesos_sinapticos).sum(axis=1)))
    if grandeza is Grandeza.V_EXTERNO:
        return float(np.max(2.0 * (abs(p.potencial_fuga) + lim.i_mais / p.condutancia_fuga)))
    if grandeza is Grandeza.VARIANCIA:
        return float(np.max(lim.sigma_sup ** 2 - lim.sigma_inf ** 2))
    return 1.0


def limite_variacao(parametros: ParametrosValidados, grandeza: Grandeza, m: int, limitar: bool = True) -> float:
    """
    Limite analítico de var_m da grandeza (variation_bound).

    Args:
        parametros (ParametrosValidados): Parâmetros da rede.
        grandeza (Grandeza): Grandeza limitada.
        m (int): Profundidade (>= 0).
        limitar (bool): Se verdadeiro, o limite não passa da amplitude trivial da grandeza.

    Returns:
        float: O limite (máximo sobre k; soma sobre k para o kernel).
    """
    if m < 0:
        raise ValueError("A profundidade m deve ser não negativa.")
    p = parametros
    cst = constantes_variacao(p)
    cauda = fator_cauda(p, m)
    e_fuga = np.exp(-m / p.tau_fuga)
    e_fuga_2 = e_fuga ** 2

    if grandeza is Grandeza.CONDUTANCIA:
        valor = float(np.max(2.0 * (p.condutancia_maxima * cauda).sum(axis=1)))
    elif grandeza is Grandeza.V_SINAPTICO:
        valor = float(np.max((cst.a_sin * cauda).sum(axis=1) + cst.b_sin * e_fuga))
    elif grandeza is Grandeza.V_EXTERNO:
        valor = float(np.max((cst.a_ext * cauda).sum(axis=1) + cst.b_ext * e_fuga))
    elif grandeza is Grandeza.VARIANCIA:
        valor = float(np.max((cst.a_sigma * cauda).sum(axis=1) + cst.c_sigma * e_fuga_2))
    else:
        por_neuronio = (cst.a_x * cauda).sum(axis=1) + cst.b_x * e_fuga + cst.c_x * e_fuga_2
        valor = INV_RAIZ_2PI * float(np.sum(por_neuronio))

    if limitar:
        return min(valor, limite_trivial(p, grandeza))
    return valor


def soma_fator_cauda(tau: float, grau: int) -> float:
    """sum_{l>=0} P_d(l/tau) e^{-l/tau}, com cauda geométrica analítica."""
    def termo(l):
        y = l / tau
        return polinomio_cauda(y, tau, grau) * np.exp(-y)

    def razao(l: float) -> float:
        base = max(l, 1.0)
        return ((base + 1.0) / base) ** grau * math.exp(-1.0 / tau)

    return somar_serie(termo, razao)


def soma_geometrica(tau: float) -> float:
    """sum_{l>=0} e^{-l/tau}, somada como série."""
    return somar_serie(lambda l: np.exp(-l / tau), lambda l: math.exp(-1.0 / tau))
