# src/core/analise.py

import concurrent.futures
import itertools
import logging
import time
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.special import ndtr

from src.core.dinamica import (
    CONFIG_PADRAO, CalculadoraDinamica, ConfiguracaoIntegral, horizonte_avaliacao, horizonte_historico
)
from src.core.excecoes import EnumeracaoGrandeDemais, ErroRaster, JanelaIncompativel, LimiteViolado
from src.core.kernel import lei_condicional, lei_truncada, log_distribuicao, numero_trabalhadores, padroes, simular
from src.core.limites_variacao import Grandeza, limite_variacao
from src.core.parametros import ParametrosValidados, limites_de
from src.core.raster import (
    ConvencaoPassado, Raster, caudas_explicitas, caudas_extremas, decodificar_bloco, montar_raster_cilindro
)
from src.utils.rng import gerador_ensaio

__all__ = [
    "RelatorioVariacao", "medir_variacoes", "medir_variacao", "horizonte_calibrado", "limite_variacao",
    "relatorios_para_dataframe",
    "ErroMarkov", "erro_markov", "erros_markov", "ExpansaoMonomios", "expandir_monomios", "reconstruir",
    "ResultadoSilencio", "verificar_intervalo_silencioso", "EstatisticasEmpiricas", "estatisticas_empiricas",
    "binarizar_raster",
]

LIMITE_AVALIACOES = 2 ** 20
LIMITE_BITS_MONOMIOS = 20
TOL_LEMA_PRODUTO = 1e-14
TAXAS_SONDAS = (0.5, 0.1, 0.02)


# ============================================================================
# m-variação medida contra o limite analítico
# ============================================================================

@dataclass(frozen=True)
class RelatorioVariacao:
    """
    Variação medida (estimativa inferior de var_m) ao lado do limite analítico.

    Attributes:
        grandeza (Grandeza): Grandeza avaliada.
        m (int): Profundidade de concordância.
        medido_inferior (float): Maior |f(omega) - f(omega')| encontrado.
        limite_analitico (float): Limite usado na verificação.
        limite_formula (float): Valor da fórmula fechada sem o corte pela amplitude trivial.
        orcamento (float): Folga numérica admitida.
        modo_enumeracao (str): "exhaustive" ou "structured".
        n_neuronios (int): Tamanho da rede.
    """
    grandeza: Grandeza
    m: int
    medido_inferior: float
    limite_analitico: float
    limite_formula: float
    orcamento: float
    modo_enumeracao: str
    n_neuronios: int

    @property
    def respeita_limite(self) -> bool:
        return self.medido_inferior <= self.limite_analitico + self.orcamento


def relatorios_para_dataframe(relatorios: Iterable[RelatorioVariacao]) -> pd.DataFrame:
    return pd.DataFrame([
        {"quantity": r.grandeza.value, "m": r.m, "measured": r.medido_inferior, "bound": r.limite_analitico,
         "bound_formula": r.limite_formula, "mode": r.modo_enumeracao, "holds": r.respeita_limite}
        for r in relatorios
    ], columns=["quantity", "m", "measured", "bound", "bound_formula", "mode", "holds"])


def _avaliar_grandezas(parametros: ParametrosValidados, raster: Raster, horizonte: int,
                       config: ConfiguracaoIntegral) -> Dict[Grandeza, np.ndarray]:
    """Valores por neurônio no instante 0; para o kernel, p_fire do padrão em 1."""
    calc = CalculadoraDinamica(parametros, raster, 0, horizonte, config)
    n = parametros.n_neuronios
    valores = {g: np.empty(n) for g in Grandeza}
    for k in range(n):
        s, reset = calc.inicio_integracao(k, 0)
        v_sin = calc.v_sinaptico(k, s, 0)
        v_ext = calc.v_externo(k, s, 0)
        sigma2 = calc.variancia(k, s, 0, reset)
        if config.verificar_limites:
            calc.verificar_estado(k, v_sin + v_ext, sigma2)
        valores[Grandeza.CONDUTANCIA][k] = float(calc.condutancia(k, 0.0))
        valores[Grandeza.V_SINAPTICO][k] = v_sin
        valores[Grandeza.V_EXTERNO][k] = v_ext
        valores[Grandeza.VARIANCIA][k] = sigma2
        valores[Grandeza.KERNEL][k] = ndtr(-(parametros.limiar - v_sin - v_ext) / np.sqrt(sigma2))
    return valores


def _probabilidades_padroes(p_disparo: np.ndarray, todos: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Fatores por neurônio (..., 2^N, N) e produtos (..., 2^N) para todos os padrões."""
    p = p_disparo[..., None, :]
    fatores = np.where(todos, p, 1.0 - p)
    return fatores, fatores.prod(axis=-1)


def _verificar_lema_produto(fatores_a: np.ndarray, produtos_a: np.ndarray,
                            fatores_b: np.ndarray, produtos_b: np.ndarray):
    """|prod a_k - prod a'_k| <= sum |a_k - a'_k| elemento a elemento."""
    esquerda = np.abs(produtos_a - produtos_b)
    direita = np.abs(fatores_a - fatores_b).sum(axis=-1)
    if np.any(esquerda > direita + TOL_LEMA_PRODUTO):
        excesso = float(np.max(esquerda - direita))
        raise LimiteViolado(f"Diferença de produtos excede a soma das diferenças (excesso {excesso:.3e}).")


def _variacao_do_bloco(parametros, bloco, caudas, extremas, horizonte, config, todos) -> Dict[Grandeza, float]:
    explicitos = [_avaliar_grandezas(parametros, montar_raster_cilindro(bloco, c, 0), horizonte, config)
                  for c in caudas]
    zero, um = (_avaliar_grandezas(parametros, montar_raster_cilindro(bloco, c, 0), horizonte, config)
                for c in extremas)
    medido = {}
    for g in Grandeza:
        if g is Grandeza.KERNEL:
            continue
        diferenca = float(np.max(np.abs(zero[g] - um[g])))
        if explicitos:
            pilha = np.stack([v[g] for v in explicitos])
            diferenca = max(diferenca, float(np.max(pilha.max(axis=0) - pilha.min(axis=0))))
        medido[g] = diferenca

    # Kernel: max sobre os 2^N padrões de omega(1); cada par também passa pelo lema do produto
    fat_z, prod_z = _probabilidades_padroes(zero[Grandeza.KERNEL], todos)
    fat_u, prod_u = _probabilidades_padroes(um[Grandeza.KERNEL], todos)
    _verificar_lema_produto(fat_z, prod_z, fat_u, prod_u)
    diferenca = float(np.max(np.abs(prod_z - prod_u)))
    if explicitos:
        fat, prod = _probabilidades_padroes(np.stack([v[Grandeza.KERNEL] for v in explicitos]), todos)
        if len(explicitos) <= 64:
            _verificar_lema_produto(fat[:, None], prod[:, None], fat[None, :], prod[None, :])
        else:
            for extremo in (np.argmax(prod, axis=0), np.argmin(prod, axis=0)):
                colunas = np.arange(prod.shape[1])
                _verificar_lema_produto(fat, prod, fat[extremo, colunas][None], prod[extremo, colunas][None])
        diferenca = max(diferenca, float(np.max(prod.max(axis=0) - prod.min(axis=0))))
    medido[Grandeza.KERNEL] = diferenca
    return medido


def avaliar_blocos_worker(args):
    """Função worker: variação máxima de cada grandeza sobre um lote de blocos de concordância."""
    parametros, blocos, m, horizonte_cauda, horizonte, config = args
    n = parametros.n_neuronios
    caudas = caudas_explicitas(n, horizonte_cauda) if horizonte_cauda > 0 else []
    extremas = caudas_extremas(n, horizonte_cauda)
    todos = padroes(n).astype(bool)
    maximos = {g: 0.0 for g in Grandeza}
    for bloco in blocos:
        for g, valor in _variacao_do_bloco(parametros, bloco, caudas, extremas, horizonte, config, todos).items():
            maximos[g] = max(maximos[g], valor)
    return maximos


def _blocos_estruturados(n_neuronios: int, m: int) -> List[np.ndarray]:
    """Por neurônio: silêncio, disparo contínuo, disparo único em -m ou em 0."""
    opcoes = [np.zeros(m + 1, dtype=np.uint8), np.ones(m + 1, dtype=np.uint8)]
    for coluna in (0, m):
        linha = np.zeros(m + 1, dtype=np.uint8)
        linha[coluna] = 1
        opcoes.append(linha)
    unicas = list({o.tobytes(): o for o in opcoes}.values())
    return [np.stack(escolha) for escolha in itertools.product(unicas, repeat=n_neuronios)]


def _planejar_blocos(n_neuronios: int, m: int, horizonte_cauda: int,
                     modo: str = "auto") -> Tuple[List[np.ndarray], str]:
    if modo not in ("auto", "exhaustive", "structured"):
        raise ValueError(f"Modo de enumeração desconhecido: {modo}.")
    caudas = 2 ** (n_neuronios * horizonte_cauda) if horizonte_cauda > 0 else 0
    por_bloco = caudas + 2
    n_blocos = 2 ** (n_neuronios * (m + 1))
    if modo != "structured" and n_blocos * por_bloco <= LIMITE_AVALIACOES:
        return [decodificar_bloco(c, n_neuronios, m + 1) for c in range(n_blocos)], "exhaustive"

    blocos = _blocos_estruturados(n_neuronios, m)
    if modo == "exhaustive" or len(blocos) * por_bloco > LIMITE_AVALIACOES:
        raise EnumeracaoGrandeDemais(n_blocos * por_bloco, LIMITE_AVALIACOES)
    if modo == "structured":
        return blocos, "structured"
    logging.warning(f"{n_blocos} blocos de concordância x {por_bloco} caudas excedem {LIMITE_AVALIACOES} "
                    f"avaliações; usando a família estruturada de {len(blocos)} blocos.")
    return blocos, "structured"


def medir_variacoes(parametros: ParametrosValidados, m: int, horizonte_cauda: int,
                    config: Optional[ConfiguracaoIntegral] = None,
                    trabalhadores: Optional[int] = None, modo: str = "auto") -> List[RelatorioVariacao]:
    """
    Mede a m-variação das cinco grandezas numa única passagem pelos cilindros.

    As grandezas dinâmicas são avaliadas no instante 0 e o kernel é a lei de
    omega(1); os rasters coincidem em [-m, 0]. Para cada bloco de concordância
    entram todas as caudas explícitas em [-m-H, -m-1] e as caudas extremas de
    Omega_0 e Omega_1.

    Args:
        parametros (ParametrosValidados): Parâmetros da rede.
        m (int): Profundidade de concordância (>= 0).
        horizonte_cauda (int): Comprimento H das caudas explícitas.
        config (Optional[ConfiguracaoIntegral]): Controle numérico.
        trabalhadores (Optional[int]): Processos usados (limitado por GIFNET_THREADS).
        modo (str): "auto" (exaustivo até o limite de avaliações, depois estruturado),
            "exhaustive" ou "structured".

    Returns:
        List[RelatorioVariacao]: Um relatório por grandeza, na ordem de Grandeza.

    Raises:
        EnumeracaoGrandeDemais: Se nem a família estruturada couber no limite de avaliações.
        LimiteViolado: Se o lema da diferença de produtos falhar em algum par.
    """
    if m < 0 or horizonte_cauda < 0:
        raise ValueError("m e horizonte_cauda devem ser não negativos.")
    config = config or CONFIG_PADRAO
    n = parametros.n_neuronios
    blocos, modo = _planejar_blocos(n, m, horizonte_cauda, modo)
    horizonte = max(horizonte_avaliacao(parametros, config.tol_horizonte), m + horizonte_cauda + 1)

    # 1. Distribuição dos blocos entre os processos
    n_trab = min(numero_trabalhadores(trabalhadores), len(blocos))
    lotes = [blocos[i::n_trab] for i in range(n_trab)]
    tarefas = [(parametros, lote, m, horizonte_cauda, horizonte, config) for lote in lotes]

    start_time = time.perf_counter()
    if n_trab == 1:
        resultados = [avaliar_blocos_worker(t) for t in tarefas]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=n_trab) as executor:
            resultados = list(executor.map(avaliar_blocos_worker, tarefas))
    duration = time.perf_counter() - start_time
    logging.info(f"Variação m={m}: {len(blocos)} blocos ({modo}) avaliados em {duration:.2f} s.")

    # 2. Redução e comparação com os limites
    relatorios = []
    for g in Grandeza:
        medido = max(r[g] for r in resultados)
        relatorios.append(RelatorioVariacao(
            grandeza=g, m=m, medido_inferior=medido,
            limite_analitico=limite_variacao(parametros, g, m),
            limite_formula=limite_variacao(parametros, g, m, limitar=False),
            orcamento=config.orcamento, modo_enumeracao=modo, n_neuronios=n,
        ))
    return relatorios


def medir_variacao(parametros: ParametrosValidados, grandeza: Grandeza, m: int, horizonte_cauda: int,
                   config: Optional[ConfiguracaoIntegral] = None,
                   trabalhadores: Optional[int] = None, modo: str = "auto") -> RelatorioVariacao:
    """Relatório de uma grandeza (measure_variation)."""
    relatorios = medir_variacoes(parametros, m, horizonte_cauda, config, trabalhadores, modo)
    return next(r for r in relatorios if r.grandeza is Grandeza(grandeza))


def horizonte_calibrado(parametros: ParametrosValidados, eps: float, horizonte_cauda: int = 2,
                        config: Optional[ConfiguracaoIntegral] = None, trabalhadores: Optional[int] = None,
                        modo: str = "structured") -> int:
    """
    Primeira profundidade m em que a variação medida do kernel fica abaixo de eps.

    A busca vai de 0 a horizonte_historico(eps), devolvido quando nenhuma
    profundidade menor atinge eps. A medida é uma cota inferior da variação:
    para um neurônio isolado a família estruturada já contém o pior bloco,
    com N > 1 o resultado pode ficar abaixo da profundidade exaustiva.

    Args:
        parametros (ParametrosValidados): Parâmetros da rede.
        eps (float): Tolerância (> 0).
        horizonte_cauda (int): Comprimento das caudas explícitas.
        config (Optional[ConfiguracaoIntegral]): Controle numérico.
        trabalhadores (Optional[int]): Processos usados na enumeração.
        modo (str): Família de blocos, como em `medir_variacoes`.

    Returns:
        int: Profundidade calibrada, nunca maior que a analítica.
    """
    if not eps > 0:
        raise ValueError("eps deve ser positivo.")
    teto = horizonte_historico(parametros, eps)
    for m in range(teto):
        medido = medir_variacao(parametros, Grandeza.KERNEL, m, horizonte_cauda, config, trabalhadores,
                                modo).medido_inferior
        if medido < eps:
            logging.info(f"Horizonte calibrado para eps={eps:.1e}: {m} (analítico {teto}).")
            return m
    return teto


# ============================================================================
# Erro da truncagem markoviana
# ============================================================================

@dataclass(frozen=True)
class ErroMarkov:
    profundidade: int
    max_tv: float
    mean_kl: float
    n_sondas: int
    profundidade_referencia: int


def _sondas(n_neuronios: int, largura: int, profundidade: int, n_sondas: int, semente: int) -> List[Raster]:
    """
    Históricos de referência na janela [-largura, -1] para a profundidade D.

    Contexto em [-D, -1] silencioso ou saturado, combinado com cauda em
    [-largura, -D-1] vazia, cheia ou com um único disparo em -D-1. Somam-se
    n_sondas históricos aleatórios com taxas densa e esparsas e passados alternados.
    """
    d = profundidade
    cauda = largura - d
    unico = np.zeros((n_neuronios, cauda), dtype=np.uint8)
    unico[:, -1] = 1
    caudas = [
        (np.zeros((n_neuronios, cauda), dtype=np.uint8), ConvencaoPassado.VAZIO),
        (np.ones((n_neuronios, cauda), dtype=np.uint8), ConvencaoPassado.UNS),
        (unico, ConvencaoPassado.VAZIO),
    ]
    contextos = [np.zeros((n_neuronios, d), dtype=np.uint8), np.ones((n_neuronios, d), dtype=np.uint8)]
    candidatas = [Raster(np.concatenate([bits, contexto], axis=1), -largura, passado)
                  for contexto in contextos for bits, passado in caudas]

    for i in range(n_sondas):
        taxa = TAXAS_SONDAS[i % len(TAXAS_SONDAS)]
        bits = (gerador_ensaio(semente, i).random((n_neuronios, largura)) < taxa).astype(np.uint8)
        passado = ConvencaoPassado.VAZIO if i % 2 == 0 else ConvencaoPassado.UNS
        candidatas.append(Raster(bits, -largura, passado))

    unicas = {(s.bits.tobytes(), s.passado): s for s in candidatas}
    return list(unicas.values())


def _distancias(log_ref: np.ndarray, log_trunc: np.ndarray) -> Tuple[float, float]:
    """Variação total e KL(referência || truncada) entre leis sobre os 2^N padrões."""
    ref = np.exp(log_ref)
    tv = 0.5 * float(np.sum(np.abs(ref - np.exp(log_trunc))))
    kl = float(np.sum(ref * (log_ref - log_trunc)))
    return tv, max(kl, 0.0)


def erros_markov(parametros: ParametrosValidados, profundidades: Sequence[int], n_sondas: int = 8,
                 horizonte_cauda: int = 4, semente: int = 0,
                 config: Optional[ConfiguracaoIntegral] = None) -> List[ErroMarkov]:
    """
    Distâncias entre a lei truncada em D e a lei de referência, para cada D.

    As sondas são montadas para cada D (ver `_sondas`); as aleatórias são as
    mesmas em toda a varredura.

    Args:
        parametros (ParametrosValidados): Parâmetros da rede.
        profundidades (Sequence[int]): Profundidades D (>= 0).
        n_sondas (int): Número de históricos aleatórios por D.
        horizonte_cauda (int): Passos de cauda além da profundidade de referência.
        semente (int): Semente das sondas aleatórias.
        config (Optional[ConfiguracaoIntegral]): Controle numérico.

    Returns:
        List[ErroMarkov]: Um registro por profundidade, na ordem dada.
    """
    config = config or CONFIG_PADRAO
    n = parametros.n_neuronios
    if any(d < 0 for d in profundidades):
        raise ValueError("A profundidade D deve ser não negativa.")
    d_ref = max(horizonte_historico(parametros, 1e-10), max(profundidades, default=0))
    largura = d_ref + max(horizonte_cauda, 1)
    horizonte_ref = max(horizonte_avaliacao(parametros, config.tol_horizonte), largura + 1)
    logging.info(f"Erro markoviano: profundidade de referência {d_ref}, janela {largura}.")

    referencias: Dict[tuple, np.ndarray] = {}
    resultados = []
    for d in profundidades:
        tvs, kls = [], []
        sondas = _sondas(n, largura, d, n_sondas, semente)
        for sonda in sondas:
            chave = (sonda.bits.tobytes(), sonda.passado)
            if chave not in referencias:
                referencias[chave] = log_distribuicao(lei_condicional(parametros, 0, sonda, horizonte_ref, config))
            log_trunc = log_distribuicao(lei_truncada(parametros, d, sonda.colunas(-d, -1), config))
            tv, kl = _distancias(referencias[chave], log_trunc)
            tvs.append(tv)
            kls.append(kl)
        resultados.append(ErroMarkov(profundidade=int(d), max_tv=max(tvs), mean_kl=float(np.mean(kls)),
                                     n_sondas=len(sondas), profundidade_referencia=d_ref))
        logging.debug(f"D={d}: max_tv={resultados[-1].max_tv:.3e}, mean_kl={resultados[-1].mean_kl:.3e}")
    return resultados


def erro_markov(parametros: ParametrosValidados, profundidade: int, n_sondas: int = 8, horizonte_cauda: int = 4,
                semente: int = 0, config: Optional[ConfiguracaoIntegral] = None) -> ErroMarkov:
    """Erro da truncagem em uma profundidade (markov_error)."""
    return erros_markov(parametros, [profundidade], n_sondas, horizonte_cauda, semente, config)[0]


def erros_para_dataframe(erros: Iterable[ErroMarkov]) -> pd.DataFrame:
    return pd.DataFrame([{"D": e.profundidade, "max_tv": e.max_tv, "mean_kl": e.mean_kl} for e in erros],
                        columns=["D", "max_tv", "mean_kl"])


# ============================================================================
# Expansão em monômios do potencial truncado
# ============================================================================

@dataclass(frozen=True, eq=False)
class ExpansaoMonomios:
    """
    Coeficientes lambda do potencial truncado na base de monômios.

    O bit i = (n + D) N + k do índice corresponde ao fator omega_k(n), n em [-D, 0];
    coeficientes[S] é o lambda do monômio formado pelos bits de S.
    """
    profundidade: int
    n_neuronios: int
    coeficientes: np.ndarray

    @property
    def constante(self) -> float:
        return float(self.coeficientes[0])

    def fatores(self, indice: int) -> List[Tuple[int, int]]:
        """Pares (k, n) do monômio de índice dado."""
        n_bits = self.n_neuronios * (self.profundidade + 1)
        return [(i % self.n_neuronios, i // self.n_neuronios - self.profundidade)
                for i in range(n_bits) if indice >> i & 1]

    def indice(self, fatores: Iterable[Tuple[int, int]]) -> int:
        return sum(1 << ((n + self.profundidade) * self.n_neuronios + k) for k, n in set(fatores))

    def coeficiente(self, fatores: Iterable[Tuple[int, int]]) -> float:
        return float(self.coeficientes[self.indice(fatores)])

    def para_dataframe(self, tol: float = 0.0) -> pd.DataFrame:
        """Colunas (indices, lambda); índices como "k:n" separados por ';'."""
        linhas = []
        for s in np.flatnonzero(np.abs(self.coeficientes) > tol) if tol > 0 else range(self.coeficientes.size):
            rotulo = ";".join(f"{k}:{n}" for k, n in self.fatores(int(s)))
            linhas.append({"indices": rotulo, "lambda": float(self.coeficientes[s])})
        return pd.DataFrame(linhas, columns=["indices", "lambda"])


def _transformada_mobius(valores: np.ndarray, n_bits: int, sinal: float) -> np.ndarray:
    """Soma (sinal=+1) ou inversão de Möbius (sinal=-1) sobre subconjuntos, no lugar."""
    for i in range(n_bits):
        visao = valores.reshape(-1, 2, 2 ** i)
        visao[:, 1, :] += sinal * visao[:, 0, :]
    return valores


def potencial_truncado_tabela(parametros: ParametrosValidados, profundidade: int,
                              config: Optional[ConfiguracaoIntegral] = None) -> np.ndarray:
    """phi^(D) para todos os blocos omega_{-D}^0, indexados como em ExpansaoMonomios."""
    n = parametros.n_neuronios
    n_bits = n * (profundidade + 1)
    if n_bits > LIMITE_BITS_MONOMIOS:
        raise EnumeracaoGrandeDemais(2 ** n_bits, 2 ** LIMITE_BITS_MONOMIOS)
    config = config or CONFIG_PADRAO
    horizonte = max(horizonte_avaliacao(parametros, config.tol_horizonte), profundidade + 1)

    n_contextos = 2 ** (n * profundidade)
    tabela = np.empty((2 ** n, n_contextos))
    for codigo in range(n_contextos):
        contexto = decodificar_bloco(codigo, n, profundidade)
        log_p = log_distribuicao(lei_truncada(parametros, profundidade, contexto, config, horizonte))
        tabela[:, codigo] = log_p - np.logaddexp.reduce(log_p)
    # padrão de omega(0) nos bits altos
    return tabela.reshape(-1)


def expandir_monomios(parametros: ParametrosValidados, profundidade: int,
                      config: Optional[ConfiguracaoIntegral] = None) -> ExpansaoMonomios:
    """
    Coeficientes lambda por inversão de Möbius do potencial truncado (expand_monomials).

    Raises:
        EnumeracaoGrandeDemais: Se N (D + 1) > 20.
    """
    n_bits = parametros.n_neuronios * (profundidade + 1)
    valores = potencial_truncado_tabela(parametros, profundidade, config)
    coeficientes = _transformada_mobius(valores.copy(), n_bits, -1.0)
    logging.info(f"Expansão em monômios: D={profundidade}, {coeficientes.size} coeficientes.")
    return ExpansaoMonomios(profundidade=profundidade, n_neuronios=parametros.n_neuronios,
                            coeficientes=coeficientes)


def reconstruir(expansao: ExpansaoMonomios, bloco: Optional[np.ndarray] = None):
    """
    Soma dos lambda dos monômios presentes no bloco N x (D + 1).
    Sem bloco, devolve a reconstrução de todos os blocos de uma vez.
    """
    n_bits = expansao.n_neuronios * (expansao.profundidade + 1)
    if bloco is None:
        return _transformada_mobius(expansao.coeficientes.copy(), n_bits, 1.0)
    bits = np.asarray(bloco, dtype=np.int64).reshape(expansao.n_neuronios, expansao.profundidade + 1)
    codigo = int(np.sum(bits.T.reshape(-1) << np.arange(n_bits)))
    subconjuntos = np.arange(expansao.coeficientes.size)
    return float(np.sum(expansao.coeficientes[(subconjuntos & ~codigo) == 0]))


# ============================================================================
# Intervalos de silêncio
# ============================================================================

@dataclass(frozen=True)
class ResultadoSilencio:
    neuronio: int
    t0: int
    empirico: float
    erro_padrao: float
    inferior: float
    superior: float

    @property
    def dentro(self) -> bool:
        return self.inferior - 3.0 * self.erro_padrao <= self.empirico <= self.superior + 3.0 * self.erro_padrao


def limites_silencio(parametros: ParametrosValidados, k: int, t0: int) -> Tuple[float, float]:
    """
    Limites da probabilidade de k ficar em silêncio por t0 passos.

    O inferior é (prod_j Pi_j^-)^t0. O superior usa só o fator do próprio
    neurônio, (Pi_k^+)^t0, e não o produto prod_j Pi_j^+: esse produto limita
    o silêncio conjunto de todos os neurônios, que pode ser bem menor que o de k.
    """
    lim = limites_de(parametros)
    return float(np.prod(lim.cap_inf)) ** t0, float(lim.cap_sup[k]) ** t0


def verificar_intervalo_silencioso(parametros: ParametrosValidados, k: int, t0: int, ensaios: int, semente: int,
                                   horizonte: Optional[int] = None,
                                   config: Optional[ConfiguracaoIntegral] = None,
                                   trabalhadores: Optional[int] = None) -> ResultadoSilencio:
    """
    Fração de ensaios em que o neurônio k não dispara nos t0 primeiros passos (silent_interval_check).
    """
    if not 0 <= k < parametros.n_neuronios:
        raise ValueError(f"Neurônio {k} inexistente.")
    inferior, superior = limites_silencio(parametros, k, t0)
    if t0 == 0:
        return ResultadoSilencio(k, 0, 1.0, 0.0, inferior, superior)
    rasters = simular(parametros, t0, ensaios, semente, horizonte, config=config, trabalhadores=trabalhadores)
    silencio = np.array([not np.any(r.bits[k]) for r in rasters], dtype=float)
    empirico = float(silencio.mean())
    erro = float(np.sqrt(max(empirico * (1.0 - empirico), 1e-300) / ensaios))
    resultado = ResultadoSilencio(k, t0, empirico, erro, inferior, superior)
    if not resultado.dentro:
        logging.warning(f"Silêncio de {t0} passos do neurônio {k}: {empirico:.4f} fora de "
                        f"[{inferior:.4f}, {superior:.4f}] +- 3 EP.")
    return resultado


# ============================================================================
# Estatísticas empíricas e binarização
# ============================================================================

@dataclass(frozen=True, eq=False)
class EstatisticasEmpiricas:
    """
    Attributes:
        taxas, erro_taxas (np.ndarray): Taxa de disparo por neurônio e erro padrão.
        pares, erro_pares (np.ndarray): N x N x (L + 1), E[omega_k(n) omega_j(n - l)] - r_k r_j.
        blocos (Dict[int, np.ndarray]): Frequências dos 2^{wN} blocos de cada largura w.
        amostras_blocos (Dict[int, int]): Número de janelas contadas por largura.
    """
    taxas: np.ndarray
    erro_taxas: np.ndarray
    pares: np.ndarray
    erro_pares: np.ndarray
    blocos: Dict[int, np.ndarray] = field(default_factory=dict)
    amostras_blocos: Dict[int, int] = field(default_factory=dict)

    def para_dataframe(self) -> pd.DataFrame:
        """Colunas (estimator, indices, value, stderr)."""
        linhas = [{"estimator": "rate", "indices": str(k), "value": float(r), "stderr": float(e)}
                  for k, (r, e) in enumerate(zip(self.taxas, self.erro_taxas))]
        n, _, n_lags = self.pares.shape
        for k, j, lag in itertools.product(range(n), range(n), range(n_lags)):
            linhas.append({"estimator": "pairwise", "indices": f"{k},{j},{lag}",
                           "value": float(self.pares[k, j, lag]), "stderr": float(self.erro_pares[k, j, lag])})
        for largura, freq in sorted(self.blocos.items()):
            erro = np.sqrt(freq * (1.0 - freq) / max(self.amostras_blocos[largura], 1))
            linhas.extend({"estimator": "block", "indices": f"{largura},{codigo}", "value": float(freq[codigo]),
                           "stderr": float(erro[codigo])} for codigo in range(freq.size))
        return pd.DataFrame(linhas, columns=["estimator", "indices", "value", "stderr"])


def _empilhar(rasters: Sequence[Raster]) -> np.ndarray:
    if not rasters:
        raise JanelaIncompativel("Nenhum raster informado.")
    primeiro = rasters[0]
    for r in rasters[1:]:
        if r.n_neuronios != primeiro.n_neuronios or r.n0 != primeiro.n0 or r.n1 != primeiro.n1:
            raise JanelaIncompativel(
                f"Rasters com janelas diferentes: N={r.n_neuronios} [{r.n0}, {r.n1}] contra "
                f"N={primeiro.n_neuronios} [{primeiro.n0}, {primeiro.n1}]."
            )
    return np.stack([r.bits for r in rasters]).astype(float)


def estatisticas_empiricas(rasters: Sequence[Raster], defasagem_max: int = 0,
                           largura_bloco: int = 1) -> EstatisticasEmpiricas:
    """
    Taxas, correlações pareadas centradas e frequências de blocos (empirical_stats).

    Args:
        rasters (Sequence[Raster]): Rasters com o mesmo N e a mesma janela.
        defasagem_max (int): Maior defasagem L das correlações.
        largura_bloco (int): Maior largura w dos blocos (w N <= 20).

    Raises:
        JanelaIncompativel: Se os rasters não compartilharem N e janela.
        EnumeracaoGrandeDemais: Se w N > 20.
    """
    bits = _empilhar(rasters)
    m_ensaios, n, t = bits.shape
    if largura_bloco * n > LIMITE_BITS_MONOMIOS:
        raise EnumeracaoGrandeDemais(2 ** (largura_bloco * n), 2 ** LIMITE_BITS_MONOMIOS)
    if defasagem_max < 0 or largura_bloco < 0:
        raise ValueError("defasagem_max e largura_bloco devem ser não negativos.")

    # 1. Taxas
    amostras = m_ensaios * t
    taxas = bits.mean(axis=(0, 2))
    erro_taxas = np.sqrt(taxas * (1.0 - taxas) / amostras)

    # 2. Correlações pareadas
    n_lags = min(defasagem_max, t - 1) + 1
    pares = np.zeros((n, n, defasagem_max + 1))
    erro_pares = np.zeros_like(pares)
    for lag in range(n_lags):
        produto = bits[:, :, None, lag:] * bits[:, None, :, :t - lag]
        contagem = m_ensaios * (t - lag)
        media = produto.mean(axis=(0, 3))
        pares[:, :, lag] = media - np.outer(taxas, taxas)
        erro_pares[:, :, lag] = np.sqrt(media * (1.0 - media) / contagem)

    # 3. Blocos: bit c N + k para a coluna c da janela
    blocos, amostras_blocos = {}, {}
    inteiros = bits.astype(np.int64)
    for largura in range(1, min(largura_bloco, t) + 1):
        codigos = np.zeros((m_ensaios, t - largura + 1), dtype=np.int64)
        for c in range(largura):
            for k in range(n):
                codigos += inteiros[:, k, c:t - largura + 1 + c] << (c * n + k)
        contagens = np.bincount(codigos.reshape(-1), minlength=2 ** (largura * n))
        blocos[largura] = contagens / codigos.size
        amostras_blocos[largura] = codigos.size

    return EstatisticasEmpiricas(taxas=taxas, erro_taxas=erro_taxas, pares=pares, erro_pares=erro_pares,
                                 blocos=blocos, amostras_blocos=amostras_blocos)


def binarizar_raster(raster: Raster, largura: int) -> Raster:
    """
    Recodifica o raster em janelas de largura w: b_k(i) = 1 se k disparou em
    [n0 + i w, n0 + (i + 1) w) (bin_raster).
    """
    if largura < 1:
        raise ValueError("A largura da janela deve ser >= 1.")
    if largura == 1:
        return raster
    n, comprimento = raster.bits.shape
    n_janelas = comprimento // largura
    if n_janelas == 0:
        raise ErroRaster(f"Janela de {comprimento} instantes menor que a largura {largura}.")
    bits = raster.bits[:, :n_janelas * largura].reshape(n, n_janelas, largura).max(axis=2)

    bloco = None
    if raster.passado is ConvencaoPassado.REPETIR:
        periodo = raster.bloco_repeticao.shape[1]
        if periodo % largura != 0:
            raise ErroRaster(f"Período {periodo} do passado não é múltiplo da largura {largura}.")
        bloco = raster.bloco_repeticao.reshape(n, periodo // largura, largura).max(axis=2)
    return Raster(bits, raster.n0 // largura, raster.passado, bloco)
