import json
import sys
from pathlib import Path

import numpy as np
import pytest
import yaml

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from core.audio import write_wav_file  # noqa: E402
from models.audio_models import AudioClip, StereoCall  # noqa: E402

IVR_TONES_HZ = (440.0, 660.0, 880.0)
TONE_STEP_S = 0.4


def tone_loop(duration_s: float, rate: int, amplitude: float = 0.5) -> np.ndarray:
    """IVR-like menu audio: a loop of pure tones, TONE_STEP_S each"""
    n = int(round(duration_s * rate))
    t = np.arange(n) / rate
    step = (t // TONE_STEP_S).astype(int) % len(IVR_TONES_HZ)
    freqs = np.asarray(IVR_TONES_HZ)[step]
    return amplitude * np.sin(2 * np.pi * freqs * t)


def am_noise(duration_s: float, rate: int, seed: int = 0) -> np.ndarray:
    """Speech stand-in: white noise with a 3 Hz syllabic envelope"""
    n = int(round(duration_s * rate))
    t = np.arange(n) / rate
    rng = np.random.default_rng(seed)
    envelope = 0.3 * (0.5 + 0.4 * np.sin(2 * np.pi * 3.0 * t))
    return np.clip(envelope * rng.standard_normal(n), -1.0, 1.0)


def synthetic_call(call_id: str, ivr_s: float, talk_s: float, rate: int = 8000, seed: int = 0) -> StereoCall:
    """Agent channel: tone loop then speech; customer silent until the agent picks up"""
    agent = np.concatenate([tone_loop(ivr_s, rate), am_noise(talk_s, rate, seed)])
    customer = np.concatenate([np.zeros(int(round(ivr_s * rate))), am_noise(talk_s, rate, seed + 10_000)])
    return StereoCall(
        call_id=call_id,
        agent=AudioClip(samples=agent, sample_rate_hz=rate, channel_label="agent"),
        customer=AudioClip(samples=customer, sample_rate_hz=rate, channel_label="customer"),
    )


CORPUS_DEMANDS = [
    ("a segunda via da fatura", "Claro, a segunda via da fatura foi enviada para o seu email cadastrado agora mesmo."),
    ("cancelar o plano de internet", "Entendi, o cancelamento do plano de internet fica registrado e vale no próximo ciclo."),
    ("mudar a data de vencimento", "Posso mudar a data de vencimento para o dia dez a partir do mês que vem sem custo."),
    ("saber o saldo do pacote de dados", "O saldo do pacote de dados aparece no aplicativo e hoje restam quatro gigas no plano."),
    ("trocar o chip do celular", "Para trocar o chip do celular basta ir a uma loja com documento e o chip novo sai na hora."),
    ("contestar uma cobrança indevida", "Abri a contestação da cobrança indevida e o estorno aparece na próxima fatura em até trinta dias."),
    ("ativar o roaming internacional", "O roaming internacional foi ativado e funciona em qualquer país da lista do site oficial."),
    ("reclamar da velocidade da conexão", "Fiz um teste remoto da conexão e a velocidade voltou ao normal depois de reiniciar o modem."),
    ("parcelar a dívida em aberto", "A dívida em aberto pode ser parcelada em seis vezes sem juros pelo boleto que vou gerar."),
    ("atualizar o endereço de cobrança", "O endereço de cobrança foi atualizado e as próximas faturas chegam no local novo."),
    ("desbloquear a linha", "A linha estava bloqueada por falta de pagamento e já fiz o desbloqueio que leva duas horas."),
    ("agendar uma visita técnica", "A visita técnica ficou agendada para quinta de manhã e o técnico liga antes de chegar."),
    ("portabilidade do número", "A portabilidade do número leva três dias úteis e a linha antiga continua funcionando até lá."),
    ("aumentar o limite do cartão", "O aumento de limite do cartão depende de análise e a resposta chega por mensagem em dois dias."),
    ("cadastrar débito automático", "O débito automático foi cadastrado na sua conta bancária e começa no próximo vencimento."),
    ("recuperar a senha do aplicativo", "Enviei um código para recuperar a senha do aplicativo e ele vale por dez minutos."),
    ("informações sobre o reembolso", "O reembolso foi aprovado e o valor cai na conta em até cinco dias úteis."),
    ("trocar o aparelho com defeito", "A troca do aparelho com defeito é feita na garantia e a retirada é gratuita."),
    ("incluir um dependente no plano", "O dependente foi incluído no plano e a carteirinha chega pelos correios em uma semana."),
    ("suspender a assinatura temporariamente", "A assinatura fica suspensa por até noventa dias e volta sozinha depois desse prazo."),
]

CORPUS_NAMES = ["Carlos", "Maria", "Pedro", "Ana", "Lucas"]


def corpus_segments(index: int):
    """Mock ASR output for one corpus call, timestamps relative to the trimmed audio"""
    demand, answer = CORPUS_DEMANDS[index]
    name = CORPUS_NAMES[index % len(CORPUS_NAMES)]
    agent = [
        {"start": 0.2, "end": 1.8, "text": "Central de atendimento, bom dia."},
        {"start": 7.5, "end": 11.5, "text": answer},
        {"start": 12.4, "end": 13.0, "text": "Tenha um bom dia."},
    ]
    customer = [
        {"start": 2.0, "end": 3.2, "text": f"Oi, bom dia, meu nome é {name}."},
        {"start": 3.5, "end": 6.8, "text": f"Eu queria {demand}, por favor."},
        {"start": 11.8, "end": 12.3, "text": "Obrigado."},
    ]
    return agent, customer


@pytest.fixture
def corpus(tmp_path):
    """20 stereo calls (about 6 s IVR + 14 s conversation at 8 kHz), mock ASR
    fixtures and a config file; returns the config path."""
    input_dir = tmp_path / "recordings"
    input_dir.mkdir()
    fixtures = {}
    for index in range(len(CORPUS_DEMANDS)):
        call_id = f"call_{index:03d}"
        call = synthetic_call(call_id, ivr_s=6.0, talk_s=14.0, rate=8000, seed=index)
        write_wav_file(input_dir / f"{call_id}.wav", call)
        agent, customer = corpus_segments(index)
        fixtures[f"{call_id}/agent"] = agent
        fixtures[f"{call_id}/customer"] = customer

    (tmp_path / "asr_fixtures.json").write_text(json.dumps(fixtures, ensure_ascii=False), encoding="utf-8")
    config = {
        "input_dir": "recordings",
        "workspace_dir": "workspace",
        "sample_rate_hz": 8000,
        "asr": {"backend": "mock", "fixtures": "asr_fixtures.json"},
        "llm": {"backend": "mock", "backoff_base_s": 0.0},
        "embed": {"backend": "mock", "dim": 64},
    }
    config_path = tmp_path / "pipeline.yaml"
    config_path.write_text(yaml.safe_dump(config), encoding="utf-8")
    return config_path


def write_config(directory: Path, **overrides) -> Path:
    """Minimal config file in directory; input_dir is created"""
    (directory / "recordings").mkdir(exist_ok=True)
    config = {"input_dir": "recordings", "workspace_dir": "workspace"}
    config.update(overrides)
    path = directory / "pipeline.yaml"
    path.write_text(yaml.safe_dump(config), encoding="utf-8")
    return path
