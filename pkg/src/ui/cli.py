# src/ui/cli.py

import argparse
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from src.core.excecoes import ErroConfiguracao
from src.core.limites_variacao import Grandeza
from src.utils.list_utils import gerar_lista_de_profundidades

COMANDOS = ("simulate", "bounds", "variation", "approx", "stats", "bin")
COM_PARAMETROS = {"simulate", "bounds", "variation", "approx"}
COM_ENTRADAS = {"stats", "bin"}
ESTOCASTICOS = {"simulate", "approx"}


@dataclass(frozen=True)
class ConfiguracaoExecucao:
    """
    Configuração de uma execução da linha de comando.

    Attributes:
        comando (str): Subcomando (simulate, bounds, variation, approx, stats, bin).
        config (Optional[str]): Arquivo JSON de parâmetros.
        entradas (List[str]): Rasters de entrada (stats, bin).
        semente (Optional[int]): Semente global; obrigatória para comandos estocásticos.
        passos, ensaios (int): Tamanho da simulação.
        profundidades (List[int]): Profundidades D da varredura de approx.
        valores_m (List[int]): Profundidades m da varredura de variation.
        eps (float): Tolerância do horizonte histórico.
        saida (str): Diretório de saída.
    """
    comando: str
    config: Optional[str] = None
    entradas: List[str] = field(default_factory=list)
    semente: Optional[int] = None
    passos: int = 1000
    ensaios: int = 1
    profundidades: List[int] = field(default_factory=lambda: list(range(7)))
    valores_m: List[int] = field(default_factory=lambda: list(range(9)))
    eps: float = 1e-8
    saida: str = "resultados"
    largura: int = 3
    defasagem_max: int = 5
    horizonte_cauda: int = 4
    sondas: int = 8
    profundidade_monomios: int = 1
    grandezas: List[Grandeza] = field(default_factory=lambda: [Grandeza.KERNEL])
    leis: bool = False
    verbose: bool = False

    def validar(self) -> "ConfiguracaoExecucao":
        """
        Raises:
            ErroConfiguracao: Opção ausente ou fora do domínio.
        """
        if self.comando not in COMANDOS:
            raise ErroConfiguracao(f"Comando desconhecido: {self.comando}")
        if self.comando in COM_PARAMETROS and not self.config:
            raise ErroConfiguracao(f"'{self.comando}' exige --config.")
        if self.comando in COM_ENTRADAS and not self.entradas:
            raise ErroConfiguracao(f"'{self.comando}' exige --input com ao menos um raster.")
        if self.comando in ESTOCASTICOS and self.semente is None:
            raise ErroConfiguracao(f"'{self.comando}' é estocástico e exige --seed.")
        if self.passos < 1 or self.ensaios < 1:
            raise ErroConfiguracao(f"--steps e --trials devem ser >= 1 (recebido {self.passos}, {self.ensaios}).")
        if not self.eps > 0:
            raise ErroConfiguracao("--eps deve ser positivo.")
        if self.largura < 1 or self.defasagem_max < 0 or self.horizonte_cauda < 0 or self.sondas < 2:
            raise ErroConfiguracao("--width >= 1, --max-lag >= 0, --tail-horizon >= 0 e --histories >= 2.")
        if self.profundidade_monomios < 0 or not self.profundidades or not self.valores_m:
            raise ErroConfiguracao("Profundidades devem ser listas não vazias de inteiros >= 0.")
        return self


def construir_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gifnet",
        description="Simulação e verificação de limites de redes gIF (integrate-and-fire generalizado).",
    )
    parser.add_argument("comando", choices=COMANDOS)
    parser.add_argument("--config", help="Arquivo JSON com os parâmetros da rede.")
    parser.add_argument("--input", dest="entradas", action="append", default=[],
                        help="Raster de entrada (repetível) para stats e bin.")
    parser.add_argument("--seed", dest="semente", type=int)
    parser.add_argument("--steps", dest="passos", type=int, default=1000)
    parser.add_argument("--trials", dest="ensaios", type=int, default=1)
    parser.add_argument("--depth", dest="profundidade", type=int, default=6,
                        help="Maior profundidade D da varredura de approx (0..D).")
    parser.add_argument("--depths", dest="lista_profundidades",
                        help="Lista explícita de D, por exemplo '0; 2; 4'.")
    parser.add_argument("--m-max", dest="m_max", type=int, default=8, help="Varredura de variation em m = 0..M.")
    parser.add_argument("--m-list", dest="lista_m", help="Lista explícita de m, por exemplo '0; 4; 8'.")
    parser.add_argument("--eps", type=float, default=1e-8)
    parser.add_argument("--out", dest="saida", default="resultados")
    parser.add_argument("--width", dest="largura", type=int, default=3,
                        help="Largura dos blocos (stats) ou das janelas (bin).")
    parser.add_argument("--max-lag", dest="defasagem_max", type=int, default=5)
    parser.add_argument("--tail-horizon", dest="horizonte_cauda", type=int, default=4)
    parser.add_argument("--histories", dest="sondas", type=int, default=8)
    parser.add_argument("--monomial-depth", dest="profundidade_monomios", type=int, default=1)
    parser.add_argument("--quantity", dest="grandeza", default=Grandeza.KERNEL.value,
                        choices=[g.value for g in Grandeza] + ["all"])
    parser.add_argument("--laws", dest="leis", action="store_true", help="Exporta a lei de cada passo (laws.csv).")
    parser.add_argument("--verbose", "-v", action="store_true")
    return parser


def _lista(texto: Optional[str], maximo: int, opcao: str) -> List[int]:
    try:
        if texto:
            return gerar_lista_de_profundidades({"metodo": "lista", "valores": texto})
        return gerar_lista_de_profundidades({"metodo": "passo", "min": 0, "max": maximo, "passo": 1})
    except ValueError as e:
        raise ErroConfiguracao(f"{opcao}: {e}") from e


def analisar_argumentos(argv: Optional[Sequence[str]] = None) -> ConfiguracaoExecucao:
    """
    Converte a linha de comando em uma ConfiguracaoExecucao validada.

    Raises:
        SystemExit: Erro de uso detectado pelo argparse (código 2).
        ErroConfiguracao: Combinação de opções inválida.
    """
    args = construir_parser().parse_args(argv)
    grandezas = list(Grandeza) if args.grandeza == "all" else [Grandeza(args.grandeza)]
    return ConfiguracaoExecucao(
        comando=args.comando, config=args.config, entradas=list(args.entradas), semente=args.semente,
        passos=args.passos, ensaios=args.ensaios,
        profundidades=_lista(args.lista_profundidades, args.profundidade, "--depths"),
        valores_m=_lista(args.lista_m, args.m_max, "--m-list"),
        eps=args.eps, saida=args.saida, largura=args.largura, defasagem_max=args.defasagem_max,
        horizonte_cauda=args.horizonte_cauda, sondas=args.sondas,
        profundidade_monomios=args.profundidade_monomios, grandezas=grandezas,
        leis=args.leis, verbose=args.verbose,
    ).validar()
