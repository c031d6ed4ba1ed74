# src/core/parametros.py

import logging
import math
from dataclasses import dataclass, fields
from enum import Enum
from functools import lru_cache
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy.special import log_ndtr, ndtr

from src.core.excecoes import (
    CapacitanciaNaoPositiva, CondutanciaNegativa, LimiteViolado, ParametroInvalido,
    RefratarioForaDoIntervalo, SigmaNaoPositivo
)
from src.core.perfis import PerfilAlfa, TipoPerfil, grau_do_perfil
from src.utils.validators import exigir_finito, exigir_forma, exigir_nao_negativo, exigir_positivo


class Populacao(Enum):
    """Pertinência do neurônio pré-sináptico ao conjunto excitatório ou inibitório."""
    EXCITATORIA = "E"
    INIBITORIA = "I"


# --- Corrente externa ---

@dataclass(frozen=True)
class CorrenteConstante:
    valor: float

    def avaliar(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.valor)

    def supremo(self) -> float:
        return abs(self.valor)

    def quebras(self) -> Tuple[float, ...]:
        return ()


@dataclass(frozen=True)
class CorrenteDegrau:
    """Corrente `valor` no intervalo [t_inicio, t_fim), nula fora dele."""
    valor: float
    t_inicio: float
    t_fim: float

    def avaliar(self, t):
        t = np.asarray(t, dtype=float)
        return np.where((t >= self.t_inicio) & (t < self.t_fim), self.valor, 0.0)

    def supremo(self) -> float:
        return abs(self.valor)

    def quebras(self) -> Tuple[float, ...]:
        return (self.t_inicio, self.t_fim)


@dataclass(frozen=True)
class CorrenteSenoidal:
    """amplitude * sin(2 pi t / periodo + fase)."""
    amplitude: float
    periodo: float
    fase: float = 0.0

    def avaliar(self, t):
        t = np.asarray(t, dtype=float)
        return self.amplitude * np.sin(2.0 * np.pi * t / self.periodo + self.fase)

    def supremo(self) -> float:
        return abs(self.amplitude)

    def quebras(self) -> Tuple[float, ...]:
        return ()


TermoCorrente = Union[CorrenteConstante, CorrenteDegrau, CorrenteSenoidal]


@dataclass(frozen=True)
class EspecificacaoCorrente:
    """
    Corrente externa determinística i_k^(ext)(t), como soma de termos por neurônio.

    Attributes:
        termos (Tuple[Tuple[TermoCorrente, ...], ...]): Termos de cada neurônio.
    """
    termos: Tuple[Tuple[TermoCorrente, ...], ...]

    @classmethod
    def nula(cls, n_neuronios: int) -> "EspecificacaoCorrente":
        return cls(termos=tuple(() for _ in range(n_neuronios)))

    def avaliar(self, k: int, t):
        t = np.asarray(t, dtype=float)
        total = np.zeros_like(t)
        for termo in self.termos[k]:
            total = total + termo.avaliar(t)
        return total

    def supremo_neuronio(self, k: int) -> float:
        return float(sum(termo.supremo() for termo in self.termos[k]))

    @property
    def i_mais(self) -> float:
        """Majorante i+ de |i_k^(ext)(t)| sobre todos os neurônios e tempos."""
        if not self.termos:
            return 0.0
        return max(self.supremo_neuronio(k) for k in range(len(self.termos)))

    def quebras(self, k: int) -> Tuple[float, ...]:
        return tuple(q for termo in self.termos[k] for q in termo.quebras())

    @property
    def invariante_no_tempo(self) -> bool:
        return all(isinstance(termo, CorrenteConstante) for neuronio in self.termos for termo in neuronio)


def corrente_externa_em(especificacao: EspecificacaoCorrente, k: int, t: float) -> float:
    """Avalia i_k^(ext)(t) (external_current_at)."""
    return float(especificacao.avaliar(k, t))


def _termo_de_dicionario(dados: Dict[str, Any]) -> TermoCorrente:
    tipo = str(dados.get("kind", "")).lower()
    if tipo == "constant":
        return CorrenteConstante(valor=float(dados["value"]))
    if tipo == "step":
        return CorrenteDegrau(valor=float(dados["value"]), t_inicio=float(dados["t_on"]), t_fim=float(dados["t_off"]))
    if tipo == "sinusoid":
        return CorrenteSenoidal(amplitude=float(dados["amplitude"]), periodo=float(dados["period"]),
                                fase=float(dados.get("phase", 0.0)))
    raise ParametroInvalido(f"tipo de termo de corrente desconhecido '{tipo}'", "external_current")


# --- Parâmetros da rede ---

def _somente_leitura(valores, forma: tuple) -> np.ndarray:
    arr = np.array(np.broadcast_to(np.asarray(valores, dtype=float), forma), dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class ParametrosRede:
    """
    Vetor completo de parâmetros gamma da rede gIF.

    Os campos por neurônio aceitam escalares (replicados) na construção e são
    armazenados como arrays numpy somente leitura.
    """
    n_neuronios: int
    capacitancia: np.ndarray                 # C_k
    limiar: float                            # theta
    potencial_fuga: float                    # E_L
    potencial_excitatorio: float             # E+
    potencial_inibitorio: float              # E-
    condutancia_fuga: np.ndarray             # g_L,k
    populacao: Tuple[Populacao, ...]         # por neurônio pré-sináptico j
    condutancia_maxima: np.ndarray           # G_kj (N x N), 0 = sem sinapse
    tau_sinaptico: np.ndarray                # tau_kj (N x N)
    tipo_perfil: TipoPerfil = TipoPerfil.EXPONENCIAL
    grau_perfil: int = 0
    amplitude_ruido: float = 1.0             # sigma_B
    desvio_reset: float = 0.1                # sigma_R
    refratario: float = 0.0                  # tau_refr
    corrente_externa: Optional[EspecificacaoCorrente] = None

    def __post_init__(self):
        n = int(self.n_neuronios)
        object.__setattr__(self, "n_neuronios", n)
        object.__setattr__(self, "capacitancia", _somente_leitura(self.capacitancia, (n,)))
        object.__setattr__(self, "condutancia_fuga", _somente_leitura(self.condutancia_fuga, (n,)))
        object.__setattr__(self, "condutancia_maxima", _somente_leitura(self.condutancia_maxima, (n, n)))
        object.__setattr__(self, "tau_sinaptico", _somente_leitura(self.tau_sinaptico, (n, n)))
        populacao = self.populacao
        if isinstance(populacao, (Populacao, str)):
            populacao = [populacao] * n
        object.__setattr__(self, "populacao", tuple(Populacao(p) for p in populacao))
        object.__setattr__(self, "tipo_perfil", TipoPerfil(self.tipo_perfil))
        if self.corrente_externa is None:
            object.__setattr__(self, "corrente_externa", EspecificacaoCorrente.nula(n))

    # --- Grandezas derivadas diretamente dos campos ---

    @property
    def grau(self) -> int:
        return grau_do_perfil(self.tipo_perfil, self.grau_perfil)

    @property
    def tau_fuga(self) -> np.ndarray:
        """tau_L,k = C_k / g_L,k."""
        return self.capacitancia / self.condutancia_fuga

    @property
    def pesos_sinapticos(self) -> np.ndarray:
        """W_kj = E+ G_kj para j excitatório e E- G_kj para j inibitório."""
        reversao = np.array([
            self.potencial_excitatorio if p is Populacao.EXCITATORIA else self.potencial_inibitorio
            for p in self.populacao
        ])
        return self.condutancia_maxima * reversao[None, :]

    @property
    def sinapses(self) -> np.ndarray:
        return self.condutancia_maxima > 0.0

    def perfil(self, k: int, j: int) -> PerfilAlfa:
        return PerfilAlfa(self.tipo_perfil, float(self.tau_sinaptico[k, j]), self.grau)

    def presinapticos(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.sinapses[k])

    def substituir(self, **alteracoes) -> "ParametrosRede":
        """Cópia com campos alterados (mesma classe)."""
        valores = {f.name: getattr(self, f.name) for f in fields(self)}
        valores.update(alteracoes)
        return type(self)(**valores)

    @classmethod
    def de_dicionario(cls, dados: Dict[str, Any]) -> "ParametrosRede":
        """
        Constrói os parâmetros a partir do dicionário do arquivo de configuração.

        Raises:
            ParametroInvalido: Campo obrigatório ausente ou de tipo inválido.
        """
        obrigatorios = ["n_neurons", "capacitance", "threshold", "leak_reversal", "excitatory_reversal",
                        "inhibitory_reversal", "leak_conductance", "population", "max_conductance",
                        "synapse_tau", "noise_amplitude", "reset_std"]
        for chave in obrigatorios:
            if chave not in dados:
                raise ParametroInvalido("campo obrigatório ausente", chave)

        n = dados["n_neurons"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise ParametroInvalido(f"deve ser um inteiro positivo (recebido {n!r})", "n_neurons")

        corrente_bruta = dados.get("external_current")
        if corrente_bruta is None:
            corrente = EspecificacaoCorrente.nula(n)
        else:
            if len(corrente_bruta) != n:
                raise ParametroInvalido(f"esperada uma lista por neurônio ({n})", "external_current")
            corrente = EspecificacaoCorrente(termos=tuple(
                tuple(_termo_de_dicionario(t) for t in termos) for termos in corrente_bruta
            ))

        try:
            return cls(
                n_neuronios=n,
                capacitancia=dados["capacitance"],
                limiar=float(dados["threshold"]),
                potencial_fuga=float(dados["leak_reversal"]),
                potencial_excitatorio=float(dados["excitatory_reversal"]),
                potencial_inibitorio=float(dados["inhibitory_reversal"]),
                condutancia_fuga=dados["leak_conductance"],
                populacao=dados["population"],
                condutancia_maxima=dados["max_conductance"],
                tau_sinaptico=dados["synapse_tau"],
                tipo_perfil=dados.get("profile_kind", "exponential"),
                grau_perfil=int(dados.get("profile_degree", 0)),
                amplitude_ruido=float(dados["noise_amplitude"]),
                desvio_reset=float(dados["reset_std"]),
                refratario=float(dados.get("refractory", 0.0)),
                corrente_externa=corrente,
            )
        except (TypeError, ValueError) as e:
            if isinstance(e, ParametroInvalido):
                raise
            raise ParametroInvalido(str(e), "parameters") from e


@dataclass(frozen=True, eq=False)
class ParametrosValidados(ParametrosRede):
    """Parâmetros que passaram por `validar_parametros`; imutáveis e compartilháveis entre processos."""


def validar_parametros(parametros: ParametrosRede) -> ParametrosValidados:
    """
    Verifica todos os invariantes do vetor de parâmetros.

    Args:
        parametros (ParametrosRede): Parâmetros brutos.

    Returns:
        ParametrosValidados: Objeto imutável validado.

    Raises:
        CapacitanciaNaoPositiva, SigmaNaoPositivo, RefratarioForaDoIntervalo,
        CondutanciaNegativa, ParametroInvalido: Indicando campo e índice.
    """
    if isinstance(parametros, ParametrosValidados):
        return parametros

    n = parametros.n_neuronios
    if n < 1:
        raise ParametroInvalido("deve ser um inteiro positivo", "n_neurons")

    # 1. Formas
    exigir_forma(parametros.capacitancia, (n,), "capacitance")
    exigir_forma(parametros.condutancia_fuga, (n,), "leak_conductance")
    exigir_forma(parametros.condutancia_maxima, (n, n), "max_conductance")
    exigir_forma(parametros.tau_sinaptico, (n, n), "synapse_tau")
    if len(parametros.populacao) != n:
        raise ParametroInvalido(f"esperados {n} rótulos E/I", "population")
    if len(parametros.corrente_externa.termos) != n:
        raise ParametroInvalido(f"esperada uma lista de termos por neurônio ({n})", "external_current")

    # 2. Positividade e sinais
    exigir_positivo(parametros.capacitancia, "capacitance", CapacitanciaNaoPositiva)
    exigir_positivo(parametros.condutancia_fuga, "leak_conductance")
    exigir_positivo(parametros.tau_sinaptico, "synapse_tau")
    exigir_nao_negativo(parametros.condutancia_maxima, "max_conductance", CondutanciaNegativa)
    exigir_positivo(parametros.amplitude_ruido, "noise_amplitude", SigmaNaoPositivo)
    exigir_positivo(parametros.desvio_reset, "reset_std", SigmaNaoPositivo)

    # 3. Escalares finitos
    for campo, valor in [("threshold", parametros.limiar), ("leak_reversal", parametros.potencial_fuga),
                         ("excitatory_reversal", parametros.potencial_excitatorio),
                         ("inhibitory_reversal", parametros.potencial_inibitorio)]:
        exigir_finito(valor, campo)

    if not (0.0 <= parametros.refratario < 1.0) or not math.isfinite(parametros.refratario):
        raise RefratarioForaDoIntervalo(f"deve estar em [0, 1) (recebido {parametros.refratario})", "refractory")

    if parametros.tipo_perfil is TipoPerfil.POTENCIA_EXPONENCIAL and parametros.grau_perfil < 0:
        raise ParametroInvalido("deve ser um inteiro não negativo", "profile_degree")

    # 4. Corrente externa limitada
    for k, termos in enumerate(parametros.corrente_externa.termos):
        for termo in termos:
            for nome, valor in vars(termo).items():
                if not math.isfinite(valor):
                    raise ParametroInvalido(f"termo com {nome} não finito", "external_current", (k,))
            if isinstance(termo, CorrenteSenoidal) and termo.periodo <= 0:
                raise ParametroInvalido("período deve ser positivo", "external_current", (k,))

    logging.debug(f"Parâmetros validados para N={n} neurônios.")
    return ParametrosValidados(**{f.name: getattr(parametros, f.name) for f in fields(parametros)})


# --- Tabela de limites uniformes ---

@dataclass(frozen=True, eq=False)
class TabelaLimites:
    """
    Limites uniformes em s, t e omega, derivados em forma fechada dos parâmetros.

    Todos os campos por neurônio são arrays de comprimento N.
    """
    alfa_mais: float
    i_mais: float
    g_max: np.ndarray
    tau_fuga: np.ndarray
    tau_min: np.ndarray
    v_inf: np.ndarray
    v_sup: np.ndarray
    sigma_inf: np.ndarray
    sigma_sup: np.ndarray
    x_inf: np.ndarray
    x_sup: np.ndarray
    pi_inf: np.ndarray
    pi_sup: np.ndarray
    cap_inf: np.ndarray
    cap_sup: np.ndarray
    log_cap_inf: np.ndarray
    m_p_inferior: float
    log_m_p_inferior: float

    def para_dataframe(self) -> pd.DataFrame:
        """Tabela longa com colunas (quantity, neuron, value), como em bounds.csv."""
        linhas: List[Dict[str, Any]] = [
            {"quantity": "alpha_plus", "neuron": "", "value": self.alfa_mais},
            {"quantity": "i_plus", "neuron": "", "value": self.i_mais},
        ]
        por_neuronio = [
            ("g_max", self.g_max), ("tau_leak", self.tau_fuga), ("tau_min", self.tau_min),
            ("v_lo", self.v_inf), ("v_hi", self.v_sup), ("sigma_lo", self.sigma_inf),
            ("sigma_hi", self.sigma_sup), ("x_lo", self.x_inf), ("x_hi", self.x_sup),
            ("pi_lo", self.pi_inf), ("pi_hi", self.pi_sup), ("cap_lo", self.cap_inf),
            ("cap_hi", self.cap_sup), ("log_cap_lo", self.log_cap_inf),
        ]
        for nome, valores in por_neuronio:
            linhas.extend({"quantity": nome, "neuron": str(k), "value": float(v)} for k, v in enumerate(valores))
        linhas.append({"quantity": "m_p_lower", "neuron": "", "value": self.m_p_inferior})
        linhas.append({"quantity": "log_m_p_lower", "neuron": "", "value": self.log_m_p_inferior})
        return pd.DataFrame(linhas, columns=["quantity", "neuron", "value"])


def alfa_mais(parametros: ParametrosRede) -> float:
    """
    alpha+ = max_kj sum_{n>=0} A_kj(n), sobre as sinapses existentes
    (ou sobre todos os pares, se a rede não tiver sinapses).
    """
    mascara = parametros.sinapses if np.any(parametros.sinapses) else np.ones_like(parametros.sinapses)
    taus = np.unique(parametros.tau_sinaptico[mascara])
    return max(PerfilAlfa(parametros.tipo_perfil, float(tau), parametros.grau).soma_supremos() for tau in taus)


def derivar_limites(parametros: ParametrosValidados) -> TabelaLimites:
    """
    Calcula a tabela de limites uniformes (g_M, tau_M, V+-, sigma+-, pi+-, Pi+-, m(p)).

    Returns:
        TabelaLimites: A tabela completa.

    Raises:
        SerieDivergente: Se a série de alpha+ não convergir.
        LimiteViolado: Se algum invariante estrutural da tabela falhar.
    """
    p = parametros
    alfa = alfa_mais(p)
    g_fuga = p.condutancia_fuga
    capacitancia = p.capacitancia

    # 1. Condutâncias e tempos característicos
    g_max = g_fuga + alfa * p.condutancia_maxima.sum(axis=1)
    tau_fuga = capacitancia / g_fuga
    tau_min = capacitancia / g_max

    # 2. Potencial determinístico: contribuição sináptica e externa
    i_mais = p.corrente_externa.i_mais
    pesos = p.pesos_sinapticos
    amplitude_externa = abs(p.potencial_fuga) + i_mais / g_fuga
    v_inf = alfa / g_fuga * np.minimum(pesos, 0.0).sum(axis=1) - amplitude_externa
    v_sup = alfa / g_fuga * np.maximum(pesos, 0.0).sum(axis=1) + amplitude_externa

    # 3. Desvio padrão condicional
    ruido = p.amplitude_ruido / capacitancia
    sigma_inf = np.minimum(ruido * np.sqrt(tau_min / 2.0), p.desvio_reset)
    sigma_sup = np.maximum(ruido * np.sqrt(tau_fuga / 2.0), p.desvio_reset)

    # 4. Intervalo admissível de X_k e probabilidades extremas
    folga_sup = p.limiar - v_sup
    folga_inf = p.limiar - v_inf
    x_inf = np.where(folga_sup >= 0.0, folga_sup / sigma_sup, folga_sup / sigma_inf)
    x_sup = np.where(folga_inf >= 0.0, folga_inf / sigma_inf, folga_inf / sigma_sup)
    pi_inf = ndtr(-x_sup)
    pi_sup = ndtr(-x_inf)
    cap_inf = np.minimum(pi_inf, 1.0 - pi_sup)
    cap_sup = np.maximum(pi_sup, 1.0 - pi_inf)
    log_cap_inf = np.minimum(log_ndtr(-x_sup), log_ndtr(x_inf))
    log_m_p = float(np.sum(log_cap_inf))

    tabela = TabelaLimites(
        alfa_mais=alfa, i_mais=i_mais, g_max=g_max, tau_fuga=tau_fuga, tau_min=tau_min,
        v_inf=v_inf, v_sup=v_sup, sigma_inf=sigma_inf, sigma_sup=sigma_sup,
        x_inf=x_inf, x_sup=x_sup, pi_inf=pi_inf, pi_sup=pi_sup,
        cap_inf=cap_inf, cap_sup=cap_sup, log_cap_inf=log_cap_inf,
        m_p_inferior=math.exp(log_m_p), log_m_p_inferior=log_m_p,
    )

    # 5. Invariantes estruturais
    if np.any(tau_min > tau_fuga) or np.any(v_inf > v_sup):
        raise LimiteViolado("Tabela de limites inconsistente: tau_M > tau_L ou V- > V+.")
    if np.any(sigma_inf <= 0.0) or np.any(sigma_inf > sigma_sup) or not math.isfinite(log_m_p):
        raise LimiteViolado("Tabela de limites inconsistente: sigma ou m(p) fora do domínio.")

    logging.debug(f"Limites derivados: alpha+={alfa:.6g}, log m(p)>={log_m_p:.6g}")
    return tabela


@lru_cache(maxsize=32)
def limites_de(parametros: ParametrosValidados) -> TabelaLimites:
    """Tabela de limites memorizada por instância de parâmetros."""
    return derivar_limites(parametros)


def parametros_de_dicionario(dados: Dict[str, Any]) -> ParametrosValidados:
    """Atalho: constrói e valida a partir do dicionário de configuração."""
    return validar_parametros(ParametrosRede.de_dicionario(dados))

