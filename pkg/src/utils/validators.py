import numpy as np
from typing import Optional, Type

from src.core.excecoes import ParametroInvalido


def _primeiro_indice(mascara: np.ndarray) -> Optional[tuple]:
    """Índice do primeiro elemento marcado (None para escalares)."""
    posicoes = np.argwhere(mascara)
    if posicoes.size == 0:
        return None
    return tuple(int(i) for i in posicoes[0])


def exigir_finito(valores, campo: str):
    """
    Garante que todos os elementos de um array são finitos.

    Raises:
        ParametroInvalido: Aponta o primeiro índice não finito.
    """
    valores = np.asarray(valores, dtype=float)
    mascara = ~np.isfinite(valores)
    if np.any(mascara):
        raise ParametroInvalido("valor não finito", campo, _primeiro_indice(mascara))


def exigir_positivo(valores, campo: str, erro: Type[ParametroInvalido] = ParametroInvalido):
    """
    Garante valores estritamente positivos (e finitos).

    Args:
        valores: Escalar ou array a verificar.
        campo (str): Nome do campo para a mensagem de erro.
        erro (Type[ParametroInvalido]): Subclasse de erro a ser lançada.
    """
    valores = np.asarray(valores, dtype=float)
    if np.any(valores <= 0):
        indice = _primeiro_indice(valores <= 0)
        valor = valores[indice] if indice is not None else float(valores)
        raise erro(f"deve ser estritamente positivo (recebido {valor})", campo, indice)
    exigir_finito(valores, campo)


def exigir_nao_negativo(valores, campo: str, erro: Type[ParametroInvalido] = ParametroInvalido):
    valores = np.asarray(valores, dtype=float)
    if np.any(valores < 0):
        indice = _primeiro_indice(valores < 0)
        valor = valores[indice] if indice is not None else float(valores)
        raise erro(f"não pode ser negativo (recebido {valor})", campo, indice)
    exigir_finito(valores, campo)


def exigir_forma(valores, forma: tuple, campo: str):
    """Verifica a forma de um array (por exemplo N ou N x N)."""
    if np.shape(valores) != forma:
        raise ParametroInvalido(f"forma {np.shape(valores)} incompatível, esperado {forma}", campo)
