# src/core/dinamica.py

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.core.excecoes import HorizonteRaso, LimiteViolado
from src.core.limites_variacao import Grandeza, limite_variacao
from src.core.parametros import ParametrosValidados, limites_de
from src.core.perfis import (  # noqa: F401  (reexportados como operações da dinâmica)
    PerfilAlfa, limite_cauda_alfa, primitiva_perfil, soma_alfa, valor_alfa, valor_perfil
)
from src.core.raster import MENOS_INFINITO, Raster, tempos_de_disparo_array, ultimo_reset
from src.utils.integration import integrar


@dataclass(frozen=True)
class ConfiguracaoIntegral:
    """
    Controle numérico das integrais da dinâmica.

    Attributes:
        tol_rel (float): Tolerância relativa da quadratura.
        nos_por_unidade (int): Nós de Gauss-Legendre por trecho unitário.
        limite_refinamento (int): Número máximo de divisões ao meio.
        tol_horizonte (float): Massa sináptica máxima descartada pelo truncamento do passado.
        orcamento (float): Folga aditiva usada nas verificações de limites.
        verificar_limites (bool): Verifica os sanduíches analíticos em cada avaliação.
    """
    tol_rel: float = 1e-9
    nos_por_unidade: int = 8
    limite_refinamento: int = 6
    tol_horizonte: float = 1e-10
    orcamento: float = 1e-8
    verificar_limites: bool = True

    def __post_init__(self):
        if not self.tol_rel > 0 or not self.tol_horizonte > 0 or self.orcamento < 0:
            raise ValueError("As tolerâncias da ConfiguracaoIntegral devem ser positivas.")
        if self.nos_por_unidade < 1 or self.limite_refinamento < 1:
            raise ValueError("nos_por_unidade e limite_refinamento devem ser >= 1.")


CONFIG_PADRAO = ConfiguracaoIntegral()


class CalculadoraDinamica:
    """
    Avalia condutâncias, vazamento efetivo e os termos do potencial de membrana
    de um raster, para instantes até t_ref.

    Os disparos usados são os instantes n com floor(t_ref) - horizonte <= n < t_ref.
    A integral interna de g_k é exata (primitivas dos perfis); as integrais
    externas ponderadas por Gamma_k usam quadratura de Gauss-Legendre composta.
    """

    def __init__(self, parametros: ParametrosValidados, raster: Raster, t_ref: float,
                 horizonte: int, config: Optional[ConfiguracaoIntegral] = None):
        self.parametros = parametros
        self.raster = raster
        self.t_ref = float(t_ref)
        self.horizonte = int(horizonte)
        self.config = config or CONFIG_PADRAO
        self.limites = limites_de(parametros)
        self.corte = math.floor(self.t_ref) - self.horizonte

        # 1. Coleta dos disparos de cada neurônio dentro do horizonte
        self.disparos: List[np.ndarray] = [
            tempos_de_disparo_array(raster, j, self.t_ref, self.horizonte).astype(float)
            for j in range(parametros.n_neuronios)
        ]
        self._presinapticos: Dict[int, Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]] = {}

        # 2. Massa sináptica descartada pelo truncamento
        if raster.tem_disparos_antes(self.corte):
            profundidade = self.t_ref - self.corte
            for k in range(parametros.n_neuronios):
                cauda = sum(
                    parametros.condutancia_maxima[k, j] * parametros.perfil(k, j).limite_cauda(profundidade)
                    for j in parametros.presinapticos(k)
                )
                if cauda > self.config.tol_horizonte:
                    raise HorizonteRaso(
                        f"Horizonte {self.horizonte} descarta massa sináptica {cauda:.3e} no neurônio {k} "
                        f"(tolerância {self.config.tol_horizonte:.1e})."
                    )

    def _disparos_do_neuronio(self, k: int):
        """Disparos pré-sinápticos de k concatenados, com G_kj, W_kj e tau_kj por disparo."""
        if k not in self._presinapticos:
            p = self.parametros
            pesos = p.pesos_sinapticos
            tempos, g, w, tau = [], [], [], []
            for j in p.presinapticos(k):
                t_j = self.disparos[j]
                tempos.append(t_j)
                g.append(np.full(t_j.size, p.condutancia_maxima[k, j]))
                w.append(np.full(t_j.size, pesos[k, j]))
                tau.append(np.full(t_j.size, p.tau_sinaptico[k, j]))
            juntar = (lambda partes: np.concatenate(partes) if partes else np.zeros(0))
            self._presinapticos[k] = (juntar(tempos), juntar(g), juntar(w), juntar(tau))
        return self._presinapticos[k]

    # --- Condutância e vazamento ---

    def _soma_alfa_ponderada(self, k: int, u: np.ndarray, usar_pesos: bool) -> np.ndarray:
        tempos, g, w, tau = self._disparos_do_neuronio(k)
        u = np.asarray(u, dtype=float)
        if tempos.size == 0:
            return np.zeros_like(u)
        decorrido = u[..., None] - tempos
        valores = np.where(decorrido > 0.0, valor_perfil(decorrido, tau, self.parametros.grau), 0.0)
        return valores @ (w if usar_pesos else g)

    def condutancia(self, k: int, u) -> np.ndarray:
        """g_k(u) = g_L,k + sum_j G_kj alpha_kj(u)."""
        return self.parametros.condutancia_fuga[k] + self._soma_alfa_ponderada(k, u, usar_pesos=False)

    def integral_condutancia(self, k: int, u, t: float) -> np.ndarray:
        """Integral exata de g_k de u até t (u <= t <= t_ref)."""
        tempos, g, _, tau = self._disparos_do_neuronio(k)
        u = np.asarray(u, dtype=float)
        total = self.parametros.condutancia_fuga[k] * (t - u)
        if tempos.size == 0:
            return total
        grau = self.parametros.grau
        primitiva_t = primitiva_perfil(t - tempos, tau, grau)
        primitiva_u = primitiva_perfil(u[..., None] - tempos, tau, grau)
        return total + (primitiva_t - primitiva_u) @ g

    def vazamento(self, k: int, u, t: float) -> np.ndarray:
        """Gamma_k(u, t) = exp(-(1/C_k) integral_u^t g_k)."""
        return np.exp(-self.integral_condutancia(k, u, t) / self.parametros.capacitancia[k])

    # --- Integrais do potencial ---

    def _integrar(self, funcao, s: float, t: float, quebras=()) -> float:
        return integrar(funcao, s, t, tol_rel=self.config.tol_rel, nos_por_unidade=self.config.nos_por_unidade,
                        limite_refinamento=self.config.limite_refinamento, quebras_extras=quebras)

    def v_sinaptico(self, k: int, s: float, t: float) -> float:
        """(1/C_k) sum_j W_kj integral_s^t Gamma_k(t1, t) alpha_kj(t1) dt1."""
        tempos, _, _, _ = self._disparos_do_neuronio(k)
        if tempos.size == 0 or s >= t:
            return 0.0
        integrando = (lambda u: self.vazamento(k, u, t) * self._soma_alfa_ponderada(k, u, usar_pesos=True))
        return self._integrar(integrando, s, t) / self.parametros.capacitancia[k]

    def v_externo(self, k: int, s: float, t: float) -> float:
        """(1/C_k) integral_s^t (E_L g_L,k + i_k(t1)) Gamma_k(t1, t) dt1."""
        p = self.parametros
        termos = p.corrente_externa.termos[k]
        if s >= t or (p.potencial_fuga == 0.0 and not termos):
            return 0.0
        base = p.potencial_fuga * p.condutancia_fuga[k]
        integrando = (lambda u: self.vazamento(k, u, t) * (base + p.corrente_externa.avaliar(k, u)))
        return self._integrar(integrando, s, t, p.corrente_externa.quebras(k)) / p.capacitancia[k]

    def variancia(self, k: int, s: float, t: float, reset_na_janela: bool) -> float:
        """Gamma_k^2(s, t) sigma_R^2 (se houve reset) + (sigma_B/C_k)^2 integral_s^t Gamma_k^2."""
        p = self.parametros
        termo_reset = float(self.vazamento(k, s, t)) ** 2 * p.desvio_reset ** 2 if reset_na_janela else 0.0
        if s >= t:
            return termo_reset
        ruido = (p.amplitude_ruido / p.capacitancia[k]) ** 2
        integral = self._integrar(lambda u: self.vazamento(k, u, t) ** 2, s, t)
        return termo_reset + ruido * integral

    def inicio_integracao(self, k: int, n: int) -> Tuple[float, bool]:
        """Limite inferior s: último reset, ou truncamento em n - horizonte."""
        tau_k = ultimo_reset(self.raster, k, n)
        truncamento = n - self.horizonte
        if tau_k == MENOS_INFINITO or tau_k < truncamento:
            return float(truncamento), False
        return float(tau_k), True

    def estado_neuronio(self, k: int, n: int) -> Tuple[float, float]:
        """
        Potencial determinístico e variância condicional do neurônio k no instante n.

        Returns:
            Tuple[float, float]: (V_det, sigma^2).
        """
        s, reset = self.inicio_integracao(k, n)
        v_det = self.v_sinaptico(k, s, n) + self.v_externo(k, s, n)
        sigma2 = self.variancia(k, s, n, reset)
        if self.config.verificar_limites:
            self.verificar_estado(k, v_det, sigma2)
        return v_det, sigma2

    def verificar_estado(self, k: int, v_det: float, sigma2: float):
        lim = self.limites
        folga = self.config.orcamento * max(1.0, abs(lim.v_inf[k]), abs(lim.v_sup[k]))
        if not (lim.v_inf[k] - folga <= v_det <= lim.v_sup[k] + folga):
            raise LimiteViolado(f"V_det={v_det} fora de [{lim.v_inf[k]}, {lim.v_sup[k]}] (neurônio {k}).")
        folga = self.config.orcamento * max(1.0, lim.sigma_sup[k] ** 2)
        if not (lim.sigma_inf[k] ** 2 - folga <= sigma2 <= lim.sigma_sup[k] ** 2 + folga):
            raise LimiteViolado(f"sigma^2={sigma2} fora de [{lim.sigma_inf[k] ** 2}, {lim.sigma_sup[k] ** 2}] "
                                f"(neurônio {k}).")


# --- Operações do módulo ---

def condutancia(parametros: ParametrosValidados, t: float, raster: Raster, horizonte: int,
                config: Optional[ConfiguracaoIntegral] = None) -> np.ndarray:
    """
    Condutância g_k(t, omega) de todos os neurônios.

    Raises:
        HorizonteRaso: Se o truncamento do passado descartar massa acima da tolerância.
    """
    calc = CalculadoraDinamica(parametros, raster, t, horizonte, config)
    valores = np.array([float(calc.condutancia(k, t)) for k in range(parametros.n_neuronios)])
    if calc.config.verificar_limites:
        folga = calc.config.orcamento * np.maximum(1.0, calc.limites.g_max)
        if np.any(valores < parametros.condutancia_fuga - folga) or np.any(valores > calc.limites.g_max + folga):
            raise LimiteViolado(f"Condutância {valores} fora de [g_L, g_M].")
    return valores


def vazamento_efetivo(parametros: ParametrosValidados, k: int, t1: float, t2: float, raster: Raster,
                      horizonte: int, config: Optional[ConfiguracaoIntegral] = None) -> float:
    """
    Vazamento efetivo Gamma_k(t1, t2, omega).

    Raises:
        ValueError: Se t1 > t2.
    """
    if t1 > t2:
        raise ValueError(f"Exige t1 <= t2 (recebido {t1} > {t2}).")
    calc = CalculadoraDinamica(parametros, raster, t2, horizonte, config)
    gama = float(calc.vazamento(k, t1, t2))
    if calc.config.verificar_limites:
        lim = calc.limites
        inferior = math.exp(-(t2 - t1) / lim.tau_min[k])
        superior = math.exp(-(t2 - t1) / lim.tau_fuga[k])
        if not (inferior - calc.config.orcamento <= gama <= superior + calc.config.orcamento):
            raise LimiteViolado(f"Gamma={gama} fora de [{inferior}, {superior}] (neurônio {k}).")
    return gama


def v_sinaptico(parametros: ParametrosValidados, s: float, t: float, raster: Raster, horizonte: int,
                config: Optional[ConfiguracaoIntegral] = None) -> np.ndarray:
    """Contribuição sináptica V^(syn)_k(s, t, omega) de todos os neurônios."""
    calc = CalculadoraDinamica(parametros, raster, t, horizonte, config)
    return np.array([calc.v_sinaptico(k, s, t) for k in range(parametros.n_neuronios)])


def v_externo(parametros: ParametrosValidados, s: float, t: float, raster: Raster, horizonte: int,
              config: Optional[ConfiguracaoIntegral] = None) -> np.ndarray:
    """Contribuição de fuga e corrente externa V^(ext)_k(s, t, omega)."""
    calc = CalculadoraDinamica(parametros, raster, t, horizonte, config)
    return np.array([calc.v_externo(k, s, t) for k in range(parametros.n_neuronios)])


def v_deterministico(parametros: ParametrosValidados, k: int, n: int, raster: Raster, horizonte: int,
                     config: Optional[ConfiguracaoIntegral] = None) -> float:
    """V^(det)_k(tau_k(n), n, omega), integrando desde o último reset (ou n - horizonte)."""
    calc = CalculadoraDinamica(parametros, raster, n, horizonte, config)
    return calc.estado_neuronio(k, n)[0]


def variancia_condicional(parametros: ParametrosValidados, k: int, n: int, raster: Raster, horizonte: int,
                          config: Optional[ConfiguracaoIntegral] = None) -> float:
    """sigma_k^2(tau_k(n), n, omega)."""
    calc = CalculadoraDinamica(parametros, raster, n, horizonte, config)
    return calc.estado_neuronio(k, n)[1]


def horizonte_historico(parametros: ParametrosValidados, eps: float, limite: int = 100_000) -> int:
    """
    Menor profundidade m cujo limite analítico de variação do kernel fica abaixo de eps.

    Args:
        parametros (ParametrosValidados): Parâmetros da rede.
        eps (float): Tolerância (> 0).
        limite (int): Profundidade máxima pesquisada.

    Returns:
        int: A profundidade m.
    """
    if not eps > 0:
        raise ValueError("eps deve ser positivo.")
    if eps >= 1.0:
        return 0

    # Busca exponencial seguida de bisseção (o limite é decrescente em m)
    def abaixo(m: int) -> bool:
        return limite_variacao(parametros, Grandeza.KERNEL, m, limitar=False) < eps

    alto = 1
    while not abaixo(alto):
        alto *= 2
        if alto > limite:
            raise HorizonteRaso(f"Nenhuma profundidade <= {limite} atinge eps={eps}.")
    if abaixo(0):
        return 0
    baixo = alto // 2
    while alto - baixo > 1:
        meio = (alto + baixo) // 2
        if abaixo(meio):
            alto = meio
        else:
            baixo = meio
    logging.debug(f"Horizonte histórico para eps={eps:.1e}: {alto}")
    return alto


def horizonte_avaliacao(parametros: ParametrosValidados, tol: float) -> int:
    """
    Horizonte H tal que a massa sináptica além de H e o fator e^{-H/tau_L}
    (ponderado pela escala do potencial) ficam abaixo de tol.
    """
    lim = limites_de(parametros)
    escala = max(1.0, float(np.max(np.abs(lim.v_inf))), float(np.max(np.abs(lim.v_sup))),
                 float(np.max(lim.sigma_sup ** 2)))
    h_fuga = math.ceil(float(np.max(lim.tau_fuga)) * math.log(escala / tol))

    def massa(h: int) -> float:
        return max(
            sum(parametros.condutancia_maxima[k, j] * parametros.perfil(k, j).limite_cauda(h)
                for j in parametros.presinapticos(k))
            for k in range(parametros.n_neuronios)
        )

    h_sin = 0
    if np.any(parametros.sinapses):
        h_sin = 1
        while massa(h_sin) > tol:
            h_sin += 1
    return max(h_fuga, h_sin, 1)
