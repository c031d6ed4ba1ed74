import copy
import json

import pytest

from src.core.dinamica import ConfiguracaoIntegral
from src.core.parametros import parametros_de_dicionario

DADOS_ISOLADO = {
    "n_neurons": 1,
    "capacitance": 1.0,
    "threshold": 1.0,
    "leak_reversal": 0.0,
    "excitatory_reversal": 2.0,
    "inhibitory_reversal": -1.0,
    "leak_conductance": 0.5,
    "population": "E",
    "max_conductance": 0.0,
    "synapse_tau": 1.0,
    "noise_amplitude": 1.0,
    "reset_std": 0.1,
}

DADOS_ACOPLADO = {
    "n_neurons": 2,
    "capacitance": 1.0,
    "threshold": 1.0,
    "leak_reversal": 0.0,
    "excitatory_reversal": 2.0,
    "inhibitory_reversal": -1.0,
    "leak_conductance": 0.5,
    "population": ["E", "I"],
    "max_conductance": [[0.0, 0.3], [0.4, 0.0]],
    "synapse_tau": 1.0,
    "noise_amplitude": 1.0,
    "reset_std": 0.5,
}


@pytest.fixture(autouse=True)
def um_processo(monkeypatch):
    """Os testes rodam sem pool de processos, salvo quando pedem trabalhadores explicitamente."""
    monkeypatch.setenv("GIFNET_THREADS", "1")


@pytest.fixture
def dados_isolado():
    return copy.deepcopy(DADOS_ISOLADO)


@pytest.fixture
def dados_acoplado():
    return copy.deepcopy(DADOS_ACOPLADO)


@pytest.fixture
def isolado():
    """N=1, C=1, g_L=0.5, sigma_B=1, sigma_R=0.1, theta=1, sem sinapses."""
    return parametros_de_dicionario(copy.deepcopy(DADOS_ISOLADO))


@pytest.fixture
def acoplado():
    """Par E-I com sinapses cruzadas e perfil exponencial."""
    return parametros_de_dicionario(copy.deepcopy(DADOS_ACOPLADO))


@pytest.fixture
def config():
    return ConfiguracaoIntegral()


@pytest.fixture
def arquivo_isolado(tmp_path):
    caminho = tmp_path / "isolado.json"
    caminho.write_text(json.dumps(DADOS_ISOLADO), encoding="utf-8")
    return str(caminho)
