# src/core/excecoes.py

from typing import Optional


class ErroGifnet(Exception):
    """Raiz de todos os erros estruturados do pacote."""


# --- Parâmetros e configuração ---

class ParametroInvalido(ErroGifnet, ValueError):
    """
    Parâmetro da rede fora do domínio admissível.

    Args:
        mensagem (str): Descrição legível do problema.
        campo (str): Nome do campo (chave do arquivo de parâmetros).
        indice (Optional[tuple]): Índice do elemento problemático, quando houver.
    """

    def __init__(self, mensagem: str, campo: str, indice: Optional[tuple] = None):
        self.campo = campo
        self.indice = indice
        local = f"{campo}{list(indice)}" if indice is not None else campo
        super().__init__(f"{local}: {mensagem}")


class CapacitanciaNaoPositiva(ParametroInvalido):
    pass


class SigmaNaoPositivo(ParametroInvalido):
    pass


class RefratarioForaDoIntervalo(ParametroInvalido):
    pass


class CondutanciaNegativa(ParametroInvalido):
    pass


class ErroConfiguracao(ErroGifnet, ValueError):
    """Configuração de execução (linha de comando ou arquivo) inconsistente."""


# --- Rasters ---

class ErroRaster(ErroGifnet, ValueError):
    pass


class CabecalhoMalformado(ErroRaster):
    pass


class CaractereInvalido(ErroRaster):
    pass


class JanelaIncompativel(ErroRaster):
    pass


class PassadoIrresoluvel(ErroRaster):
    pass


class EnumeracaoGrandeDemais(ErroRaster):
    """A enumeração pedida excede o limite de configurações."""

    def __init__(self, contagem: int, limite: int):
        self.contagem = contagem
        self.limite = limite
        super().__init__(f"Enumeração de {contagem} configurações excede o limite de {limite}.")


# --- Numéricos ---

class ErroNumerico(ErroGifnet, RuntimeError):
    pass


class SerieDivergente(ErroNumerico):
    pass


class HorizonteRaso(ErroNumerico):
    pass


class QuadraturaNaoConvergente(ErroNumerico):
    pass


# --- Verificação de limites ---

class LimiteViolado(ErroGifnet, AssertionError):
    """Um limite analítico foi violado numericamente."""
