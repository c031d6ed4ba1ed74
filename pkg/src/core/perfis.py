# src/core/perfis.py

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable

import numpy as np
from scipy.special import gammainc

from src.core.excecoes import SerieDivergente


class TipoPerfil(Enum):
    """Família do perfil sináptico alfa."""
    EXPONENCIAL = "exponential"
    ALFA = "alpha"
    POTENCIA_EXPONENCIAL = "power_exponential"


def grau_do_perfil(tipo: TipoPerfil, grau: int = 0) -> int:
    """Grau d do termo polinomial (t/tau)^d de cada família."""
    if tipo is TipoPerfil.EXPONENCIAL:
        return 0
    if tipo is TipoPerfil.ALFA:
        return 1
    return int(grau)


def valor_perfil(x, tau, grau: int) -> np.ndarray:
    """
    Valor vetorizado (x/tau)^d e^{-x/tau} H(x), com H(0) = 1.

    Args:
        x: Tempo decorrido desde o disparo (escalar ou array).
        tau: Constante de tempo (escalar ou array compatível com x).
        grau (int): Grau d.
    """
    x = np.asarray(x, dtype=float)
    tau = np.asarray(tau, dtype=float)
    y = np.where(x >= 0.0, x, 0.0) / tau
    valor = np.power(y, grau) * np.exp(-y)
    return np.where(x >= 0.0, valor, 0.0)


def primitiva_perfil(x, tau, grau: int) -> np.ndarray:
    """
    Integral exata de 0 até x do perfil: tau * d! * P(d+1, x/tau),
    com P a função gama incompleta inferior regularizada. Nula para x <= 0.
    """
    x = np.asarray(x, dtype=float)
    tau = np.asarray(tau, dtype=float)
    y = np.where(x > 0.0, x, 0.0) / tau
    return tau * math.factorial(grau) * gammainc(grau + 1, y)


def polinomio_cauda(y, tau, grau: int) -> np.ndarray:
    """P_d(y) = tau * sum_{i=0}^{d} d!/i! y^i, o polinômio da integral da cauda."""
    y = np.asarray(y, dtype=float)
    total = np.zeros_like(y * np.asarray(tau, dtype=float))
    fatorial_d = math.factorial(grau)
    for i in range(grau + 1):
        total = total + (fatorial_d / math.factorial(i)) * np.power(y, i)
    return np.asarray(tau, dtype=float) * total


def somar_serie(
    termo: Callable[[np.ndarray], np.ndarray],
    razao: Callable[[float], float],
    tol: float = 1e-16,
    bloco: int = 256,
    max_termos: int = 10 ** 7
) -> float:
    """
    Soma uma série de termos não negativos, indexados a partir de 0.

    A soma para quando o último termo calculado fica abaixo de `tol` vezes a
    soma parcial; a cauda restante é somada analiticamente como geométrica,
    usando `razao(l)`, um majorante da razão entre termos sucessivos a partir de l.

    Raises:
        SerieDivergente: Termos não finitos, razão >= 1 no limite, ou excesso de termos.
    """
    somas_blocos = []
    inicio = 0
    while inicio < max_termos:
        indices = np.arange(inicio, inicio + bloco, dtype=float)
        termos = np.asarray(termo(indices), dtype=float)
        if not np.all(np.isfinite(termos)) or np.any(termos < 0):
            raise SerieDivergente(f"Termo inválido na série a partir do índice {inicio}.")
        somas_blocos.append(math.fsum(termos))
        parcial = math.fsum(somas_blocos)

        ultimo = float(termos[-1])
        r = razao(float(indices[-1]))
        if r < 1.0 and ultimo <= tol * parcial:
            return math.fsum(somas_blocos + [ultimo * r / (1.0 - r)])
        if parcial == 0.0 and r < 1.0:
            return 0.0
        inicio += bloco

    raise SerieDivergente(f"A série não convergiu após {max_termos} termos.")


@dataclass(frozen=True)
class PerfilAlfa:
    """
    Perfil de resposta sináptica alpha_kj(t).

    Attributes:
        tipo (TipoPerfil): Família (exponencial, alfa ou potência-exponencial).
        tau (float): Constante de tempo tau_kj, em unidades de delta = 1.
        grau (int): Grau d para a família potência-exponencial.
    """
    tipo: TipoPerfil
    tau: float
    grau: int = 0

    @property
    def d(self) -> int:
        return grau_do_perfil(self.tipo, self.grau)

    @property
    def pico(self) -> float:
        """Instante de máximo do perfil, d * tau."""
        return self.d * self.tau

    def valor(self, t):
        return valor_perfil(t, self.tau, self.d)

    def primitiva(self, x):
        return primitiva_perfil(x, self.tau, self.d)

    def limite_cauda(self, profundidade):
        """Integral da cauda: P_d(x/tau) e^{-x/tau} para x = profundidade."""
        y = np.asarray(profundidade, dtype=float) / self.tau
        return polinomio_cauda(y, self.tau, self.d) * np.exp(-y)

    def supremo_unitario(self, n):
        """A(n) = sup do perfil em [n, n+1), vetorizado em n >= 0."""
        n = np.asarray(n, dtype=float)
        return np.where(
            n + 1.0 <= self.pico,
            self.valor(n + 1.0),
            np.where(n >= self.pico, self.valor(n), self.valor(self.pico))
        )

    def razao_cauda(self, n: float) -> float:
        """Majorante da razão valor(l+1)/valor(l) para todo l > max(n, pico)."""
        if n < self.pico:
            return 1.0
        base = max(n, 1.0)
        return ((base + 1.0) / base) ** self.d * math.exp(-1.0 / self.tau)

    def soma_supremos(self) -> float:
        """
        Soma conservadora sum_{n>=0} A(n), que define alpha+ para este perfil.

        Raises:
            SerieDivergente: Se a cauda não decair numericamente.
        """
        return somar_serie(self.supremo_unitario, self.razao_cauda)


def valor_alfa(perfil: PerfilAlfa, t) -> np.ndarray:
    """Valor do perfil no instante t (zero para t < 0)."""
    return perfil.valor(t)


def soma_alfa(perfil: PerfilAlfa, t: float, disparos: Iterable[float]) -> float:
    """
    Soma sináptica sum_r alpha(t - t_r) sobre disparos estritamente anteriores a t.

    Args:
        perfil (PerfilAlfa): Perfil da sinapse.
        t (float): Instante de avaliação.
        disparos (Iterable[float]): Instantes de disparo do neurônio pré-sináptico.

    Returns:
        float: A soma (0.0 para lista vazia).
    """
    tempos = np.asarray(list(disparos), dtype=float)
    if tempos.size == 0:
        return 0.0
    decorridos = t - tempos[tempos < t]
    return float(np.sum(perfil.valor(decorridos)))


def limite_cauda_alfa(perfil: PerfilAlfa, profundidade: float) -> float:
    """Majorante da massa do perfil além de `profundidade` (alpha_tail_bound)."""
    return float(perfil.limite_cauda(profundidade))
