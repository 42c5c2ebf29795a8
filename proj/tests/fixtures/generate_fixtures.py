#!/usr/bin/env python3
"""Regenerates the binary and CSV fixtures under tests/fixtures.

Everything is seeded; rerunning produces byte-identical files.
"""
import struct
from pathlib import Path

import numpy as np

HERE = Path(__file__).resolve().parent


def write_wav(path, channels, fs, fmt):
    data = np.stack(channels, axis=1) if len(channels) > 1 else channels[0][:, None]
    n_ch = data.shape[1]
    if fmt == "pcm16":
        q = np.clip(np.round(data * 32768.0), -32768, 32767).astype("<i2")
        payload, tag, width = q.tobytes(), 1, 2
    elif fmt == "float32":
        payload, tag, width = data.astype("<f4").tobytes(), 3, 4
    else:
        raise ValueError(fmt)
    header = b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE"
    header += b"fmt " + struct.pack("<IHHIIHH", 16, tag, n_ch, fs, fs * n_ch * width, n_ch * width, width * 8)
    header += b"data" + struct.pack("<I", len(payload))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(header + payload)


def recordings():
    rng = np.random.default_rng(20240601)
    fs = 16000
    t = np.arange(5 * fs) / fs

    # Percussive bursts, silent for the first 1.5 s.
    drums = np.zeros_like(t)
    for onset in np.arange(1.5, 5.0, 0.25):
        idx = (t >= onset) & (t < onset + 0.2)
        env = np.exp(-(t[idx] - onset) * 30.0)
        drums[idx] += 0.6 * env * rng.standard_normal(idx.sum())
    write_wav(HERE / "recordings/music/drums.wav", [np.clip(drums, -1, 1)], fs, "pcm16")

    # Voiced harmonic source with syllable-rate envelope.
    f0 = 140.0
    voice = sum(np.sin(2 * np.pi * f0 * k * t) / k for k in range(1, 12))
    env = np.clip(np.sin(2 * np.pi * 3.0 * t), 0, None) ** 2
    voice = 0.3 * env * voice
    write_wav(HERE / "recordings/speech/voice.wav", [voice], fs, "pcm16")

    # Stereo noise rumble at a different rate, exercising the mono mixdown.
    fs2 = 8000
    n = 4 * fs2
    noise = rng.standard_normal((2, n))
    kernel = np.ones(16) / 16.0
    left = 0.4 * np.convolve(noise[0], kernel, mode="same")
    right = 0.4 * np.convolve(noise[1], kernel, mode="same")
    write_wav(HERE / "recordings/other/rumble.wav", [left, right], fs2, "pcm16")


def small_wavs():
    fs = 44100
    t = np.arange(fs) / fs
    write_wav(HERE / "sine440_float32.wav", [0.5 * np.sin(2 * np.pi * 440.0 * t)], fs, "float32")

    # Full-scale square: +32767 / -32768 in blocks of 4 samples.
    square = np.array([32767] * 4 + [-32768] * 4, dtype="<i2")
    payload = np.tile(square, 4).tobytes()
    header = b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE"
    header += b"fmt " + struct.pack("<IHHIIHH", 16, 1, 1, 8000, 16000, 2, 16)
    header += b"data" + struct.pack("<I", len(payload))
    (HERE / "square_pcm16.wav").write_bytes(header + payload)

    # RIFF header cut off inside the fmt chunk.
    (HERE / "truncated_header.wav").write_bytes((header + payload)[:20])


def responses():
    """26 participants x 30 questions with exactly 389 correct answers."""
    rng = np.random.default_rng(389391)
    cats = ["music"] * 10 + ["speech"] * 10 + ["other"] * 10
    stim = [f"{c}-{i % 10:02d}" for i, c in enumerate(cats)]
    correct = rng.random(26 * 30) < 0.5
    # Flip the required number of answers so the total is exactly 389.
    need = 389 - int(correct.sum())
    idx = np.flatnonzero(~correct if need > 0 else correct)
    correct[rng.choice(idx, abs(need), replace=False)] = need > 0
    rows = ["session_id,participant_id,question_index,stimulus_id,category,assignment,response,correct,theta,timestamp_utc"]
    k = 0
    for p in range(26):
        order = rng.permutation(30)
        for q, s in enumerate(order):
            assignment = "ORIGINAL_IS_A" if rng.random() < 0.5 else "ORIGINAL_IS_B"
            ok = bool(correct[k])
            k += 1
            original = "A" if assignment == "ORIGINAL_IS_A" else "B"
            response = original if ok else ("B" if original == "A" else "A")
            theta = float(rng.uniform(-np.pi, np.pi))
            rows.append(
                f"sess{p:02d},P{p:02d},{q + 1},{stim[s]},{cats[s]},{assignment},{response},"
                f"{'true' if ok else 'false'},{theta!r},2025-03-{1 + p % 28:02d}T10:{q:02d}:00.000Z"
            )
    (HERE / "responses_389_391.csv").write_text("\n".join(rows) + "\n")


if __name__ == "__main__":
    recordings()
    small_wavs()
    responses()
