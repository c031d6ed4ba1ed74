import numpy as np


def gerador_passo(semente: int, ensaio: int, passo: int) -> np.random.Generator:
    """
    Fluxo aleatório reprodutível para um (semente, ensaio, passo).

    Usa o gerador Philox (baseado em contador) com uma SeedSequence cuja
    entropia é a tupla completa, de modo que o valor sorteado independe da
    ordem de execução e do número de processos.

    Args:
        semente (int): Semente global da execução.
        ensaio (int): Índice do ensaio (trial).
        passo (int): Instante de tempo dentro do ensaio.

    Returns:
        np.random.Generator: Gerador dedicado.
    """
    sequencia = np.random.SeedSequence([int(semente), int(ensaio), int(passo) + 2 ** 31])
    return np.random.Generator(np.random.Philox(sequencia))


def gerador_ensaio(semente: int, ensaio: int) -> np.random.Generator:
    """Fluxo por ensaio (usado para sondas e sorteios fora do laço temporal)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(semente), int(ensaio)])))
