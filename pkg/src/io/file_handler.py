# src/io/file_handler.py

import json
import logging
import os
import tempfile
from typing import List, Tuple

import numpy as np
import pandas as pd

from src.core.dinamica import ConfiguracaoIntegral
from src.core.excecoes import (
    CabecalhoMalformado, CaractereInvalido, ErroConfiguracao, ErroRaster, JanelaIncompativel
)
from src.core.parametros import ParametrosValidados, parametros_de_dicionario
from src.core.raster import ConvencaoPassado, Raster

MAGICO_RASTER = "GIFRASTER 1"
FORMATO_FLOAT = "%.17g"

_CHAVES_INTEGRACAO = {
    "rel_tol": "tol_rel",
    "nodes_per_unit": "nos_por_unidade",
    "refinement_limit": "limite_refinamento",
    "horizon_tol": "tol_horizonte",
}


class FileHandler:
    """
    Responsável pela leitura e escrita dos arquivos do projeto: parâmetros (JSON),
    rasters (texto GIFRASTER) e resultados (CSV).
    """

    # --- Parâmetros ---

    def ler_parametros(self, caminho_arquivo: str) -> Tuple[ParametrosValidados, ConfiguracaoIntegral]:
        """
        Lê um arquivo JSON de parâmetros (uma instância gamma por arquivo).

        Args:
            caminho_arquivo (str): Caminho para o arquivo .json.

        Returns:
            Tuple[ParametrosValidados, ConfiguracaoIntegral]: Parâmetros validados e o
            controle numérico do bloco opcional "integration".

        Raises:
            OSError: Se o arquivo não puder ser lido.
            ErroConfiguracao: Se o JSON for inválido ou o bloco "integration" tiver chaves desconhecidas.
            ParametroInvalido: Se algum parâmetro estiver fora do domínio.
        """
        with open(caminho_arquivo, "r", encoding="utf-8") as f:
            try:
                dados = json.load(f)
            except json.JSONDecodeError as e:
                raise ErroConfiguracao(f"JSON inválido em '{caminho_arquivo}': {e}") from e
        if not isinstance(dados, dict):
            raise ErroConfiguracao(f"O arquivo '{caminho_arquivo}' deve conter um objeto JSON.")

        integracao = dados.pop("integration", {}) or {}
        desconhecidas = set(integracao) - set(_CHAVES_INTEGRACAO)
        if desconhecidas:
            raise ErroConfiguracao(f"Chaves desconhecidas em 'integration': {sorted(desconhecidas)}")
        try:
            config = ConfiguracaoIntegral(**{_CHAVES_INTEGRACAO[c]: v for c, v in integracao.items()})
        except (TypeError, ValueError) as e:
            raise ErroConfiguracao(f"Bloco 'integration' inválido: {e}") from e

        parametros = parametros_de_dicionario(dados)
        logging.info(f"Parâmetros lidos de '{caminho_arquivo}': N={parametros.n_neuronios}.")
        return parametros, config

    # --- Rasters ---

    def ler_raster(self, caminho_arquivo: str) -> Raster:
        """
        Lê um raster no formato GIFRASTER 1.

        Raises:
            CabecalhoMalformado: Cabeçalho ausente, incompleto ou janela vazia.
            CaractereInvalido: Linha de bits com caractere fora de {0,1} ou comprimento diferente de N.
            JanelaIncompativel: Número de linhas diferente do tamanho da janela.
        """
        with open(caminho_arquivo, "r", encoding="utf-8") as f:
            linhas = f.read().splitlines()
        return self.decodificar_raster(linhas, origem=caminho_arquivo)

    def decodificar_raster(self, linhas: List[str], origem: str = "<texto>") -> Raster:
        # 1. Cabeçalho
        if len(linhas) < 4 or linhas[0].strip() != MAGICO_RASTER:
            raise CabecalhoMalformado(f"{origem}: a primeira linha deve ser '{MAGICO_RASTER}'.")
        campos = [linha.split() for linha in linhas[1:4]]
        try:
            if campos[0][0] != "neurons" or campos[1][0] != "window" or campos[2][0] != "past":
                raise ValueError
            n_neuronios = int(campos[0][1])
            n0, n1 = int(campos[1][1]), int(campos[1][2])
            passado = ConvencaoPassado(campos[2][1])
        except (IndexError, ValueError) as e:
            raise CabecalhoMalformado(f"{origem}: cabeçalho inválido {linhas[1:4]}.") from e
        if n_neuronios < 1 or n1 < n0 or passado is ConvencaoPassado.REPETIR:
            raise CabecalhoMalformado(f"{origem}: N={n_neuronios}, janela [{n0}, {n1}], passado {passado.value}.")

        # 2. Linhas de bits, uma por instante
        corpo = [linha.rstrip("\r") for linha in linhas[4:]]
        while corpo and not corpo[-1].strip():
            corpo.pop()
        if len(corpo) != n1 - n0 + 1:
            raise JanelaIncompativel(f"{origem}: {len(corpo)} linhas para a janela [{n0}, {n1}].")
        bits = np.zeros((n_neuronios, len(corpo)), dtype=np.uint8)
        for i, linha in enumerate(corpo):
            if len(linha) != n_neuronios or set(linha) - {"0", "1"}:
                raise CaractereInvalido(f"{origem}: linha {i + 5} ('{linha}') não tem {n_neuronios} bits 0/1.")
            bits[:, i] = np.frombuffer(linha.encode("ascii"), dtype=np.uint8) - ord("0")
        return Raster(bits, n0, passado)

    def codificar_raster(self, raster: Raster) -> str:
        if raster.passado is ConvencaoPassado.REPETIR:
            raise ErroRaster("O formato GIFRASTER só aceita os passados 'empty' e 'allones'.")
        cabecalho = [MAGICO_RASTER, f"neurons {raster.n_neuronios}", f"window {raster.n0} {raster.n1}",
                     f"past {raster.passado.value}"]
        colunas = (raster.bits.T + ord("0")).astype(np.uint8)
        corpo = [bytes(linha).decode("ascii") for linha in colunas]
        return "\n".join(cabecalho + corpo) + "\n"

    def escrever_raster(self, raster: Raster, caminho_arquivo: str):
        """Escreve o raster no formato GIFRASTER 1 (escrita atômica)."""
        self._escrever_atomico(caminho_arquivo, self.codificar_raster(raster))
        logging.debug(f"Raster salvo em '{caminho_arquivo}'.")

    # --- Resultados ---

    def salvar_resultados_csv(self, df_resultados: pd.DataFrame, caminho_arquivo: str):
        """
        Salva o DataFrame de resultados em um arquivo CSV.

        Args:
            df_resultados (pd.DataFrame): O DataFrame com os dados a serem salvos.
            caminho_arquivo (str): O caminho completo do arquivo onde os dados serão salvos.

        Raises:
            OSError: Se ocorrer um problema ao escrever o arquivo (ex: permissão negada).
        """
        # float_format: 17 dígitos significativos, ida e volta exata
        texto = df_resultados.to_csv(index=False, float_format=FORMATO_FLOAT, lineterminator="\n")
        self._escrever_atomico(caminho_arquivo, texto)
        logging.info(f"Resultados salvos em '{caminho_arquivo}'.")

    def ler_resultados_csv(self, caminho_arquivo: str) -> pd.DataFrame:
        return pd.read_csv(caminho_arquivo)

    def _escrever_atomico(self, caminho_arquivo: str, texto: str):
        diretorio_destino = os.path.dirname(os.path.abspath(caminho_arquivo))
        os.makedirs(diretorio_destino, exist_ok=True)
        descritor, temporario = tempfile.mkstemp(dir=diretorio_destino, prefix=".tmp-", suffix=".part")
        try:
            with os.fdopen(descritor, "w", encoding="utf-8", newline="") as f:
                f.write(texto)
            os.replace(temporario, caminho_arquivo)
        except BaseException:
            if os.path.exists(temporario):
                os.remove(temporario)
            raise
