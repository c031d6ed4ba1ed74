# src/main.py

import logging
import math
import os
import sys
import time
import warnings
from typing import Callable, Dict, Optional, Sequence

import numpy as np
import pandas as pd

from src.core.analise import (
    binarizar_raster, erros_markov, erros_para_dataframe, estatisticas_empiricas, expandir_monomios,
    medir_variacoes, relatorios_para_dataframe
)
from src.core.excecoes import ErroConfiguracao, ErroNumerico, ErroRaster, LimiteViolado, ParametroInvalido
from src.core.kernel import certificado_unicidade, horizonte_padrao, simular, simular_com_leis
from src.core.limites_variacao import Grandeza, limite_variacao
from src.core.parametros import limites_de
from src.io.file_handler import FileHandler
from src.ui.cli import ConfiguracaoExecucao, analisar_argumentos
from src.ui.display import exibir_tabela

warnings.filterwarnings("ignore", category=RuntimeWarning)

TOL_MONOTONIA = 1e-10


def _caminho(config: ConfiguracaoExecucao, nome: str) -> str:
    return os.path.join(config.saida, nome)


def cmd_simulate(config: ConfiguracaoExecucao) -> bool:
    """Simula os ensaios, grava um raster por ensaio e o resumo summary.csv."""
    manipulador_arquivos = FileHandler()
    parametros, integral = manipulador_arquivos.ler_parametros(config.config)
    horizonte = horizonte_padrao(parametros, config.eps, integral)
    logging.info(f"Simulando {config.ensaios} ensaio(s) de {config.passos} passos (horizonte {horizonte}).")

    if config.leis:
        rasters, leis = simular_com_leis(parametros, config.passos, config.ensaios, config.semente,
                                         horizonte, config=integral)
        manipulador_arquivos.salvar_resultados_csv(leis, _caminho(config, "laws.csv"))
    else:
        rasters = simular(parametros, config.passos, config.ensaios, config.semente, horizonte, config=integral)

    for m, raster in enumerate(rasters):
        manipulador_arquivos.escrever_raster(raster, _caminho(config, f"raster_{m:04d}.txt"))

    estatisticas = estatisticas_empiricas(rasters, 0, 0)
    resumo = pd.DataFrame({
        "neuron": np.arange(parametros.n_neuronios),
        "rate": estatisticas.taxas,
        "stderr": estatisticas.erro_taxas,
        "seed": config.semente,
        "horizon": horizonte,
        "steps": config.passos,
        "trials": config.ensaios,
    })
    manipulador_arquivos.salvar_resultados_csv(resumo, _caminho(config, "summary.csv"))
    exibir_tabela(resumo, "Simulação")
    return True


def cmd_bounds(config: ConfiguracaoExecucao) -> bool:
    """Grava a tabela de limites (bounds.csv) e o certificado de unicidade (certificate.csv)."""
    manipulador_arquivos = FileHandler()
    parametros, _ = manipulador_arquivos.ler_parametros(config.config)
    tabela = limites_de(parametros).para_dataframe()
    certificado = certificado_unicidade(parametros)

    if not (certificado.log_m_p_inferior > -math.inf and math.isfinite(certificado.v_p_superior)):
        raise LimiteViolado(f"Certificado inválido: log m(p)={certificado.log_m_p_inferior}, "
                            f"v(p)={certificado.v_p_superior}.")
    manipulador_arquivos.salvar_resultados_csv(tabela, _caminho(config, "bounds.csv"))
    manipulador_arquivos.salvar_resultados_csv(certificado.para_dataframe(), _caminho(config, "certificate.csv"))
    exibir_tabela(certificado.para_dataframe(), "Certificado de unicidade")
    return True


def cmd_variation(config: ConfiguracaoExecucao) -> bool:
    """Mede a m-variação em cada m da varredura e compara com o limite analítico."""
    manipulador_arquivos = FileHandler()
    parametros, integral = manipulador_arquivos.ler_parametros(config.config)

    relatorios = []
    for m in config.valores_m:
        relatorios.extend(r for r in medir_variacoes(parametros, m, config.horizonte_cauda, integral)
                          if r.grandeza in config.grandezas)
    df = relatorios_para_dataframe(relatorios)
    manipulador_arquivos.salvar_resultados_csv(df, _caminho(config, "variation.csv"))
    exibir_tabela(df, "m-variação medida x limite")

    violados = [r for r in relatorios if not r.respeita_limite]
    for r in violados:
        logging.error(f"Limite violado: {r.grandeza.value} m={r.m}: medido {r.medido_inferior:.6g} > "
                      f"limite {r.limite_analitico:.6g}.")
    return not violados


def cmd_approx(config: ConfiguracaoExecucao) -> bool:
    """Erro da truncagem markoviana na varredura de D e expansão em monômios."""
    manipulador_arquivos = FileHandler()
    parametros, integral = manipulador_arquivos.ler_parametros(config.config)

    erros = erros_markov(parametros, config.profundidades, config.sondas, config.horizonte_cauda,
                         config.semente, integral)
    df = erros_para_dataframe(erros)
    # leis que coincidem em [-D, -1]: variação do kernel com m = D - 1
    df["bound"] = [1.0 if e.profundidade == 0 else limite_variacao(parametros, Grandeza.KERNEL, e.profundidade - 1)
                   for e in erros]
    df["holds"] = df["max_tv"] <= df["bound"] + integral.orcamento
    manipulador_arquivos.salvar_resultados_csv(df, _caminho(config, "markov.csv"))
    exibir_tabela(df, "Erro da truncagem markoviana")

    if np.any(np.diff(df["max_tv"].to_numpy()) > TOL_MONOTONIA):
        logging.warning("max_tv não é monótono em D nesta varredura.")

    if parametros.n_neuronios * (config.profundidade_monomios + 1) <= 20:
        expansao = expandir_monomios(parametros, config.profundidade_monomios, integral)
        manipulador_arquivos.salvar_resultados_csv(expansao.para_dataframe(), _caminho(config, "monomials.csv"))
    else:
        logging.warning(f"Expansão em monômios omitida: N(D+1) > 20 para D={config.profundidade_monomios}.")
    return bool(df["holds"].all())


def _ler_entradas(config: ConfiguracaoExecucao):
    manipulador_arquivos = FileHandler()
    return [manipulador_arquivos.ler_raster(caminho) for caminho in config.entradas]


def cmd_stats(config: ConfiguracaoExecucao) -> bool:
    """Taxas, correlações pareadas e frequências de blocos dos rasters de entrada."""
    estatisticas = estatisticas_empiricas(_ler_entradas(config), config.defasagem_max, config.largura)
    df = estatisticas.para_dataframe()
    FileHandler().salvar_resultados_csv(df, _caminho(config, "stats.csv"))
    exibir_tabela(df[df["estimator"] == "rate"], "Taxas de disparo")
    return True


def cmd_bin(config: ConfiguracaoExecucao) -> bool:
    """Binariza cada raster de entrada com janelas de largura w."""
    manipulador_arquivos = FileHandler()
    for caminho, raster in zip(config.entradas, _ler_entradas(config)):
        base = os.path.splitext(os.path.basename(caminho))[0]
        destino = _caminho(config, f"{base}_bin{config.largura}.txt")
        manipulador_arquivos.escrever_raster(binarizar_raster(raster, config.largura), destino)
        logging.info(f"'{caminho}' binarizado em '{destino}'.")
    return True


COMANDOS: Dict[str, Callable[[ConfiguracaoExecucao], bool]] = {
    "simulate": cmd_simulate,
    "bounds": cmd_bounds,
    "variation": cmd_variation,
    "approx": cmd_approx,
    "stats": cmd_stats,
    "bin": cmd_bin,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Função principal que orquestra a execução do programa.

    Returns:
        int: 0 (sucesso, todos os limites respeitados), 1 (limite violado),
        2 (erro de uso ou de configuração), 3 (não convergência numérica).
    """
    try:
        config = analisar_argumentos(argv)
    except SystemExit as e:
        return int(e.code or 0)
    except ErroConfiguracao as e:
        logging.error(f"Configuração inválida: {e}")
        return 2

    logging.basicConfig(level=logging.DEBUG if config.verbose else logging.INFO,
                        format='%(asctime)s - %(levelname)s - %(message)s', force=True)

    start_time = time.perf_counter()
    try:
        ok = COMANDOS[config.comando](config)
    except LimiteViolado as e:
        logging.error(f"Limite analítico violado: {e}")
        return 1
    except (ParametroInvalido, ErroConfiguracao, ErroRaster, OSError) as e:
        logging.error(f"Erro de entrada: {e}")
        return 2
    except ErroNumerico as e:
        logging.error(f"Erro numérico: {e}")
        return 3
    duration = time.perf_counter() - start_time
    logging.info(f"Comando '{config.comando}' finalizado em {duration:.2f} s.")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
