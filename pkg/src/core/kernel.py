# src/core/kernel.py

import concurrent.futures
import logging
import os
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.special import log_ndtr, ndtr

from src.core.dinamica import (
    CONFIG_PADRAO, CalculadoraDinamica, ConfiguracaoIntegral, horizonte_avaliacao, horizonte_historico
)
from src.core.excecoes import LimiteViolado
from src.core.limites_variacao import INV_RAIZ_2PI, constantes_variacao, soma_fator_cauda, soma_geometrica
from src.core.parametros import ParametrosValidados, limites_de
from src.core.raster import MENOS_INFINITO, ConvencaoPassado, Raster, ultimo_reset
from src.utils.rng import gerador_passo


def cauda_gaussiana(x):
    """pi(x) = P(Z > x) para Z normal padrão."""
    resultado = ndtr(-np.asarray(x, dtype=float))
    return float(resultado) if np.ndim(resultado) == 0 else resultado


@dataclass(frozen=True, eq=False)
class LeiCondicional:
    """
    Lei condicional do padrão omega(n) dado o passado até n - 1.

    Attributes:
        n (int): Instante do padrão.
        v_det, sigma, x, p_disparo (np.ndarray): Por neurônio.
        log_p, log_q (np.ndarray): log pi(X_k) e log(1 - pi(X_k)), sem perda por underflow.
    """
    n: int
    v_det: np.ndarray
    sigma: np.ndarray
    x: np.ndarray
    p_disparo: np.ndarray
    log_p: np.ndarray
    log_q: np.ndarray

    @classmethod
    def de_estado(cls, n: int, v_det, sigma, limiar: float) -> "LeiCondicional":
        v_det = np.asarray(v_det, dtype=float)
        sigma = np.asarray(sigma, dtype=float)
        x = (limiar - v_det) / sigma
        return cls(n=n, v_det=v_det, sigma=sigma, x=x, p_disparo=ndtr(-x), log_p=log_ndtr(-x), log_q=log_ndtr(x))

    @property
    def n_neuronios(self) -> int:
        return self.p_disparo.size

    def para_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame({
            "n": self.n, "k": np.arange(self.n_neuronios), "v_det": self.v_det,
            "sigma": self.sigma, "x": self.x, "p_fire": self.p_disparo,
        })


@dataclass(frozen=True)
class ValorPotencial:
    n: int
    total: float
    termos: Tuple[float, ...]


@dataclass(frozen=True)
class CertificadoUnicidade:
    m_p_inferior: float
    log_m_p_inferior: float
    v_p_superior: float

    def para_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame({
            "quantity": ["m_p_lower", "log_m_p_lower", "v_p_upper"],
            "value": [self.m_p_inferior, self.log_m_p_inferior, self.v_p_superior],
        })


# --- Lei condicional ---

def _verificar_lei(lei: LeiCondicional, parametros: ParametrosValidados, config: ConfiguracaoIntegral):
    lim = limites_de(parametros)
    folga = config.orcamento * np.maximum(1.0, np.abs(lim.x_sup) + np.abs(lim.x_inf))
    if np.any(lei.x < lim.x_inf - folga) or np.any(lei.x > lim.x_sup + folga):
        raise LimiteViolado(f"X={lei.x} fora de [{lim.x_inf}, {lim.x_sup}] no instante {lei.n}.")
    if not (np.all(np.isfinite(lei.log_p)) and np.all(np.isfinite(lei.log_q))):
        raise LimiteViolado(f"Probabilidade de disparo degenerada (0 ou 1) no instante {lei.n}.")


def lei_condicional(parametros: ParametrosValidados, n: int, raster: Raster, horizonte: int,
                    config: Optional[ConfiguracaoIntegral] = None) -> LeiCondicional:
    """
    Lei condicional exata de omega(n) dado omega até n - 1 (conditional_law).

    Args:
        parametros (ParametrosValidados): Parâmetros da rede.
        n (int): Instante do padrão sorteado; o estado é avaliado em n - 1.
        raster (Raster): Histórico com janela terminando em n - 1 ou depois.
        horizonte (int): Profundidade do passado considerada.
        config (Optional[ConfiguracaoIntegral]): Controle numérico.

    Returns:
        LeiCondicional: V_det, sigma, X e pi(X) por neurônio.
    """
    config = config or CONFIG_PADRAO
    calc = CalculadoraDinamica(parametros, raster, n - 1, horizonte, config)
    estados = [calc.estado_neuronio(k, n - 1) for k in range(parametros.n_neuronios)]
    v_det = np.array([e[0] for e in estados])
    sigma = np.sqrt(np.array([e[1] for e in estados]))
    lei = LeiCondicional.de_estado(n, v_det, sigma, parametros.limiar)
    if config.verificar_limites:
        _verificar_lei(lei, parametros, config)
    return lei


def probabilidade_transicao(lei: LeiCondicional, padrao) -> float:
    """prod_k [omega_k p_k + (1 - omega_k)(1 - p_k)]."""
    padrao = np.asarray(padrao, dtype=float)
    fatores = padrao * lei.p_disparo + (1.0 - padrao) * (1.0 - lei.p_disparo)
    return float(np.prod(fatores))


def potencial(lei: LeiCondicional, padrao) -> ValorPotencial:
    """
    Potencial de Gibbs phi(n, omega) = log da probabilidade de transição, por neurônio.

    Raises:
        LimiteViolado: Se algum termo for positivo (não é log-probabilidade).
    """
    padrao = np.asarray(padrao, dtype=bool)
    termos = np.where(padrao, lei.log_p, lei.log_q)
    if np.any(termos > 0.0):
        raise LimiteViolado(f"Termo de potencial positivo no instante {lei.n}: {termos}")
    return ValorPotencial(n=lei.n, total=float(np.sum(termos)), termos=tuple(float(t) for t in termos))


def _leis_do_bloco(parametros, raster, n_inicio, n_fim, horizonte, config):
    for n in range(n_inicio, n_fim + 1):
        yield lei_condicional(parametros, n, raster, horizonte, config), raster.colunas(n, n)[:, 0]


def probabilidade_bloco(parametros: ParametrosValidados, raster: Raster, n_inicio: int, n_fim: int,
                        horizonte: int, config: Optional[ConfiguracaoIntegral] = None) -> float:
    """
    Probabilidade do bloco omega_{n_inicio}^{n_fim} dado o passado, encadeando as transições.

    Args:
        raster (Raster): Raster que contém o bloco e o passado (janela até n_fim ou além).
    """
    produto = 1.0
    for lei, padrao in _leis_do_bloco(parametros, raster, n_inicio, n_fim, horizonte, config):
        produto *= probabilidade_transicao(lei, padrao)
    return produto


def potencial_bloco(parametros: ParametrosValidados, raster: Raster, n_inicio: int, n_fim: int,
                    horizonte: int, config: Optional[ConfiguracaoIntegral] = None) -> float:
    """Soma dos potenciais phi(n, omega) para n_inicio <= n <= n_fim."""
    return sum(potencial(lei, padrao).total
               for lei, padrao in _leis_do_bloco(parametros, raster, n_inicio, n_fim, horizonte, config))


# --- Potencial truncado ---

def raster_de_contexto(n_neuronios: int, contexto: np.ndarray) -> Raster:
    """Histórico de profundidade D terminando em -1, com passado vazio (cauda de Omega_0)."""
    contexto = np.asarray(contexto, dtype=np.uint8)
    contexto = contexto.reshape(n_neuronios, contexto.size // n_neuronios)
    # coluna de zeros em -D-1 mantém a janela não vazia quando D = 0
    bits = np.concatenate([np.zeros((n_neuronios, 1), dtype=np.uint8), contexto], axis=1)
    return Raster(bits, -bits.shape[1], ConvencaoPassado.VAZIO)


def lei_truncada(parametros: ParametrosValidados, profundidade: int, contexto: np.ndarray,
                 config: Optional[ConfiguracaoIntegral] = None, horizonte: Optional[int] = None) -> LeiCondicional:
    """Lei condicional em 0 usando apenas o contexto omega_{-D}^{-1} (cauda vazia)."""
    config = config or CONFIG_PADRAO
    if horizonte is None:
        horizonte = horizonte_avaliacao(parametros, config.tol_horizonte)
    raster = raster_de_contexto(parametros.n_neuronios, contexto)
    if raster.comprimento != profundidade + 1:
        raise ValueError(f"Contexto com {raster.comprimento - 1} colunas para profundidade {profundidade}.")
    return lei_condicional(parametros, 0, raster, max(int(horizonte), profundidade + 1), config)


def padroes(n_neuronios: int) -> np.ndarray:
    """Todos os 2^N padrões, um por linha (bit k do código = neurônio k)."""
    codigos = np.arange(2 ** n_neuronios)[:, None]
    return ((codigos >> np.arange(n_neuronios)[None, :]) & 1).astype(np.uint8)


def log_distribuicao(lei: LeiCondicional) -> np.ndarray:
    """log P(padrão) para os 2^N padrões, na ordem de `padroes`."""
    todos = padroes(lei.n_neuronios).astype(bool)
    return np.where(todos, lei.log_p[None, :], lei.log_q[None, :]).sum(axis=1)


def condicional_truncada(parametros: ParametrosValidados, profundidade: int, contexto: np.ndarray, padrao,
                         config: Optional[ConfiguracaoIntegral] = None, horizonte: Optional[int] = None) -> float:
    """
    e^{phi^(D)} / Z(contexto), com Z a soma sobre os 2^N padrões (truncated_conditional).
    """
    lei = lei_truncada(parametros, profundidade, contexto, config, horizonte)
    log_pesos = log_distribuicao(lei)
    log_z = np.logaddexp.reduce(log_pesos)
    codigo = int(np.dot(np.asarray(padrao, dtype=np.int64), 2 ** np.arange(parametros.n_neuronios)))
    return float(np.exp(log_pesos[codigo] - log_z))


# --- Certificado de unicidade ---

def certificado_unicidade(parametros: ParametrosValidados) -> CertificadoUnicidade:
    """
    Limite inferior de m(p) e soma da série v(p) que garantem a unicidade da medida de Gibbs.

    Raises:
        SerieDivergente: Sinal de erro interno; não ocorre para parâmetros válidos.
    """
    lim = limites_de(parametros)
    cst = constantes_variacao(parametros)
    grau = parametros.grau

    somas_cauda: Dict[float, float] = {}
    total = 0.0
    for k in range(parametros.n_neuronios):
        termo = 0.0
        for j in parametros.presinapticos(k):
            tau = float(parametros.tau_sinaptico[k, j])
            if tau not in somas_cauda:
                somas_cauda[tau] = soma_fator_cauda(tau, grau)
            termo += cst.a_x[k, j] * somas_cauda[tau]
        tau_fuga = float(lim.tau_fuga[k])
        termo += cst.b_x[k] * soma_geometrica(tau_fuga) + cst.c_x[k] * soma_geometrica(tau_fuga / 2.0)
        total += termo

    return CertificadoUnicidade(
        m_p_inferior=lim.m_p_inferior, log_m_p_inferior=lim.log_m_p_inferior,
        v_p_superior=INV_RAIZ_2PI * total,
    )


# --- Amostragem ---

def amostrar_passo(lei: LeiCondicional, gerador: np.random.Generator) -> np.ndarray:
    """Cada neurônio dispara independentemente com probabilidade p_k."""
    return (gerador.random(lei.n_neuronios) < lei.p_disparo).astype(np.uint8)


def numero_trabalhadores(trabalhadores: Optional[int]) -> int:
    limite = os.environ.get("GIFNET_THREADS")
    n = trabalhadores if trabalhadores is not None else (os.cpu_count() or 1)
    if limite:
        n = min(n, max(1, int(limite)))
    return max(1, n)


def _prefixo_passado(n_neuronios: int, largura: int, passado: ConvencaoPassado) -> np.ndarray:
    if passado is ConvencaoPassado.UNS:
        return np.ones((n_neuronios, largura), dtype=np.uint8)
    return np.zeros((n_neuronios, largura), dtype=np.uint8)


class SimuladorEnsaio:
    """
    Simula um ensaio passo a passo, memorizando a lei de cada neurônio pela
    parte do histórico de que ela depende (último reset e disparos pré-sinápticos
    no horizonte; o instante só entra se a corrente variar no tempo).
    """

    def __init__(self, parametros: ParametrosValidados, horizonte: int, passado: ConvencaoPassado,
                 config: ConfiguracaoIntegral):
        self.parametros = parametros
        self.horizonte = int(horizonte)
        self.passado = ConvencaoPassado(passado)
        self.config = config
        self.cache: Dict[tuple, Tuple[float, float]] = {}
        self.acertos = 0
        if self.passado is ConvencaoPassado.REPETIR:
            raise ValueError("A simulação aceita apenas os passados 'empty' ou 'allones'.")
        # Pior caso (Omega_1): falha aqui se o horizonte descartar massa sináptica demais
        largura = self.horizonte + 2
        CalculadoraDinamica(parametros, Raster.omega_1(parametros.n_neuronios, 0, largura - 1),
                            largura - 1, self.horizonte, config)

    def _chave(self, k: int, n: int, raster: Raster) -> tuple:
        reset = ultimo_reset(raster, k, n - 1)
        corte = n - 1 - self.horizonte
        idade = None if (reset == MENOS_INFINITO or reset < corte) else int(n - 1 - reset)
        pre = self.parametros.presinapticos(k)
        janela = raster.colunas(corte, n - 2)[pre].tobytes() if pre.size else b""
        instante = None if self.parametros.corrente_externa.invariante_no_tempo else n
        return (k, idade, janela, instante)

    def lei(self, n: int, raster: Raster) -> LeiCondicional:
        p = self.parametros
        estados = []
        calc = None
        for k in range(p.n_neuronios):
            chave = self._chave(k, n, raster)
            if chave in self.cache:
                self.acertos += 1
            else:
                if calc is None:
                    calc = CalculadoraDinamica(p, raster, n - 1, self.horizonte, self.config)
                self.cache[chave] = calc.estado_neuronio(k, n - 1)
            estados.append(self.cache[chave])
        lei = LeiCondicional.de_estado(n, [e[0] for e in estados], np.sqrt([e[1] for e in estados]), p.limiar)
        if self.config.verificar_limites:
            _verificar_lei(lei, p, self.config)
        return lei

    def executar(self, passos: int, semente: int, ensaio: int,
                 registrar_leis: bool = False) -> Tuple[Raster, Optional[pd.DataFrame]]:
        n_neur = self.parametros.n_neuronios
        largura = self.horizonte + 2
        prefixo = _prefixo_passado(n_neur, largura, self.passado)
        historico = np.concatenate([prefixo, np.zeros((n_neur, passos), dtype=np.uint8)], axis=1)
        leis = []

        for n in range(passos):
            # janela [n - H - 2, n - 1]; a coluna c do histórico é o instante c - largura
            raster = Raster(historico[:, n:n + largura], n - largura, self.passado)
            lei = self.lei(n, raster)
            historico[:, largura + n] = amostrar_passo(lei, gerador_passo(semente, ensaio, n))
            if registrar_leis:
                leis.append(lei.para_dataframe().assign(trial=ensaio))

        logging.debug(f"Ensaio {ensaio}: {self.acertos} leis reaproveitadas em {passos * n_neur} avaliações.")
        resultado = Raster(historico[:, largura:], 0, self.passado)
        return resultado, (pd.concat(leis, ignore_index=True) if registrar_leis else None)


def simular_ensaio_worker(args):
    """Função worker para a simulação paralela de um ensaio."""
    (parametros, horizonte, passado, config, passos, semente, ensaio, registrar_leis) = args
    simulador = SimuladorEnsaio(parametros, horizonte, passado, config)
    return simulador.executar(passos, semente, ensaio, registrar_leis)


def _executar_ensaios(parametros, passos, ensaios, semente, horizonte, passado, config, trabalhadores,
                      registrar_leis):
    if passos < 1 or ensaios < 1:
        raise ValueError(f"passos e ensaios devem ser >= 1 (recebido {passos}, {ensaios}).")
    config = config or CONFIG_PADRAO
    if horizonte is None:
        horizonte = horizonte_padrao(parametros, 1e-8, config)

    tarefas = [(parametros, horizonte, ConvencaoPassado(passado), config, passos, semente, m, registrar_leis)
               for m in range(ensaios)]
    n_trab = min(numero_trabalhadores(trabalhadores), ensaios)

    start_time = time.perf_counter()
    if n_trab == 1:
        resultados = [simular_ensaio_worker(t) for t in tarefas]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=n_trab) as executor:
            resultados = list(executor.map(simular_ensaio_worker, tarefas))
    duration = time.perf_counter() - start_time
    logging.info(f"Simulação de {ensaios} ensaio(s) x {passos} passos finalizada em {duration:.2f} s "
                 f"({n_trab} processo(s), horizonte {horizonte}).")
    return resultados


def horizonte_padrao(parametros: ParametrosValidados, eps: float,
                     config: Optional[ConfiguracaoIntegral] = None) -> int:
    """Horizonte usado quando o chamador não informa: cobre eps e o truncamento sináptico."""
    config = config or CONFIG_PADRAO
    return max(horizonte_historico(parametros, eps), horizonte_avaliacao(parametros, config.tol_horizonte))


def simular(parametros: ParametrosValidados, passos: int, ensaios: int, semente: int,
            horizonte: Optional[int] = None, passado: ConvencaoPassado = ConvencaoPassado.VAZIO,
            config: Optional[ConfiguracaoIntegral] = None, trabalhadores: Optional[int] = None) -> List[Raster]:
    """
    Sorteia `ensaios` rasters de `passos` instantes (janela [0, passos - 1]).

    O resultado depende só de (parametros, passos, ensaios, semente, horizonte,
    passado): cada passo usa um fluxo aleatório próprio e os ensaios voltam na
    ordem dos índices, qualquer que seja o número de processos.
    """
    resultados = _executar_ensaios(parametros, passos, ensaios, semente, horizonte, passado, config,
                                   trabalhadores, registrar_leis=False)
    return [raster for raster, _ in resultados]


def simular_com_leis(parametros: ParametrosValidados, passos: int, ensaios: int, semente: int,
                     horizonte: Optional[int] = None, passado: ConvencaoPassado = ConvencaoPassado.VAZIO,
                     config: Optional[ConfiguracaoIntegral] = None,
                     trabalhadores: Optional[int] = None) -> Tuple[List[Raster], pd.DataFrame]:
    """Como `simular`, devolvendo também a tabela (trial, n, k, v_det, sigma, x, p_fire)."""
    resultados = _executar_ensaios(parametros, passos, ensaios, semente, horizonte, passado, config,
                                   trabalhadores, registrar_leis=True)
    leis = pd.concat([df for _, df in resultados], ignore_index=True)
    return [raster for raster, _ in resultados], leis[["trial", "n", "k", "v_det", "sigma", "x", "p_fire"]]
