import numpy as np
from typing import List, Dict, Any


def gerar_lista_de_profundidades(dados: Dict[str, Any]) -> List[int]:
    """
    Gera uma lista de profundidades (m ou D) com base no método e nos valores
    fornecidos pela linha de comando.

    Args:
        dados (Dict[str, Any]): {"metodo": "lista", "valores": "0; 2; 4"} ou
            {"metodo": "passo", "min": 0, "max": 8, "passo": 1}.

    Returns:
        List[int]: Uma lista ordenada de profundidades não negativas, sem duplicatas.

    Raises:
        ValueError: Se o método for desconhecido ou um valor não for inteiro.
    """
    metodo = dados.get("metodo")

    if metodo == "lista":
        # Converte a string "0; 2; 4" numa lista de inteiros.
        valores_str = dados.get("valores", "")
        profundidades = [int(v.strip()) for v in valores_str.replace(",", ";").split(';') if v.strip()]

    elif metodo == "passo":
        passo = int(dados.get("passo", 1))
        if passo < 1:
            raise ValueError("O passo deve ser >= 1.")
        profundidades = np.arange(int(dados.get("min", 0)), int(dados["max"]) + 1, passo).tolist()

    else:
        raise ValueError(f"Método de lista desconhecido: {metodo!r}")

    return sorted(set(p for p in profundidades if p >= 0))
