import json

import numpy as np
from click.testing import CliRunner

from lpvoc import audio_io, cli, dsp

from conftest import harmonic_vowel


def write_test_wav(path, samples):
    audio_io.write_wav(audio_io.AudioSignal(samples=samples), path)


def test_encode_reports_counts(tmp_path):
    x = dsp.float_to_pcm(harmonic_vowel(duration_s=0.9))
    assert x.size == 7200
    wav = tmp_path / "in.wav"
    write_test_wav(wav, x)
    runner = CliRunner()
    res = runner.invoke(cli.main, ["encode", "--codec", "melp", "-i", str(wav),
                                   "-o", str(tmp_path / "out.lpvc")])
    assert res.exit_code == 0
    assert "units: 40" in res.output
    assert "payload_bits: 2160" in res.output
    assert "bitrate_bps: 2400" in res.output


def test_encode_decode_preserves_length(tmp_path):
    x = dsp.float_to_pcm(harmonic_vowel(duration_s=0.3))
    wav = tmp_path / "in.wav"
    write_test_wav(wav, x)
    runner = CliRunner()
    enc = runner.invoke(cli.main, ["encode", "--codec", "celp", "-i", str(wav),
                                   "-o", str(tmp_path / "c.lpvc")])
    assert enc.exit_code == 0
    dec = runner.invoke(cli.main, ["decode", "-i", str(tmp_path / "c.lpvc"),
                                   "-o", str(tmp_path / "out.wav")])
    assert dec.exit_code == 0
    assert "codec: celp" in dec.output
    out = audio_io.read_wav(tmp_path / "out.wav")
    assert len(out) == x.size


def test_missing_input_exits_2(tmp_path):
    runner = CliRunner()
    res = runner.invoke(cli.main, ["decode", "-i", str(tmp_path / "nope.lpvc"),
                                   "-o", str(tmp_path / "o.wav")])
    assert res.exit_code == 2


def test_corrupt_container_exits_2(tmp_path):
    bad = tmp_path / "bad.lpvc"
    bad.write_bytes(b"XXXX" + b"\x00" * 20)
    runner = CliRunner()
    res = runner.invoke(cli.main, ["decode", "-i", str(bad),
                                   "-o", str(tmp_path / "o.wav")])
    assert res.exit_code == 2
    assert "error:" in res.stderr


def test_ldcelp_recon_dump_matches_decoder(tmp_path):
    x = dsp.float_to_pcm(harmonic_vowel(duration_s=0.25))
    wav = tmp_path / "in.wav"
    write_test_wav(wav, x)
    runner = CliRunner()
    res = runner.invoke(cli.main, [
        "encode", "--codec", "ldcelp", "-i", str(wav),
        "-o", str(tmp_path / "l.lpvc"),
        "--dump-recon", str(tmp_path / "recon.raw")])
    assert res.exit_code == 0
    dec = runner.invoke(cli.main, ["decode", "-i", str(tmp_path / "l.lpvc"),
                                   "-o", str(tmp_path / "out.wav")])
    assert dec.exit_code == 0
    recon = audio_io.raw_import(tmp_path / "recon.raw")
    out = audio_io.read_wav(tmp_path / "out.wav")
    assert np.array_equal(recon.samples, out.samples)


def test_compare_identity_prints_clamp(tmp_path):
    x = dsp.float_to_pcm(harmonic_vowel(duration_s=0.3))
    wav = tmp_path / "x.wav"
    write_test_wav(wav, x)
    runner = CliRunner()
    res = runner.invoke(cli.main, ["compare", "-r", str(wav), "-d", str(wav)])
    assert res.exit_code == 0
    assert res.output.strip() == "35.00 dB"


def test_analyze_intensity_silence(tmp_path):
    wav = tmp_path / "s.wav"
    write_test_wav(wav, np.zeros(1000, dtype=np.int16))
    runner = CliRunner()
    out_csv = tmp_path / "i.csv"
    res = runner.invoke(cli.main, ["analyze", "-i", str(wav), "-o", str(out_csv)])
    assert res.exit_code == 0
    rows = out_csv.read_text().splitlines()[1:]
    assert rows
    assert all(row.endswith("-100.000000") for row in rows)


def test_analyze_spectrogram_tone(tmp_path):
    t = np.arange(2000) / 8000.0
    x = dsp.float_to_pcm(10000.0 * np.sin(2.0 * np.pi * 1000.0 * t))
    wav = tmp_path / "t.wav"
    write_test_wav(wav, x)
    runner = CliRunner()
    out_csv = tmp_path / "sp.csv"
    res = runner.invoke(cli.main, ["analyze", "-i", str(wav), "--spectrogram",
                                   "-o", str(out_csv)])
    assert res.exit_code == 0
    lines = out_csv.read_text().splitlines()
    header = lines[0].split(",")
    row = lines[1].split(",")
    peak_col = 1 + int(np.argmax([float(v) for v in row[1:]]))
    assert header[peak_col] == "1000.0Hz"


def test_prepare_mos_builds_blinded_set(tmp_path):
    x = dsp.float_to_pcm(harmonic_vowel(duration_s=0.25))
    wav = tmp_path / "src.wav"
    write_test_wav(wav, x)
    out_dir = tmp_path / "mos"
    runner = CliRunner()
    res = runner.invoke(cli.main, ["prepare-mos", "-i", str(wav), "-o", str(out_dir)])
    assert res.exit_code == 0
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert len(manifest) == 3
    assert {m["codec"] for m in manifest} == {"celp", "ldcelp", "melp"}
    for m in manifest:
        assert (out_dir / m["file"]).exists()
        # blinded filenames: nothing about the codec in the sample id
        assert m["codec"] not in m["sample_id"]
