"""Command-line front end: encode/decode, waveform analysis, MOS service.

Codebook seeds default to the fixed built-in value and can be overridden
with --seed or the LPVOC_SEED environment variable.
"""

import functools
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import analysis, audio_io, bitstream, celp, dsp, ldcelp, melp
from .errors import LpvocError

CODECS = {
    "celp": (bitstream.CODEC_CELP, celp.encode_signal, celp.decode_signal),
    "ldcelp": (bitstream.CODEC_LDCELP, ldcelp.encode_signal, ldcelp.decode_signal),
    "melp": (bitstream.CODEC_MELP, melp.encode_signal, melp.decode_signal),
}
CODEC_NAMES = {cid: name for name, (cid, _, _) in CODECS.items()}


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except LpvocError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except OSError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
    return wrapper


@click.group()
def main():
    """Linear-prediction vocoders (CELP / LD-CELP / MELP) and evaluation tools."""


seed_option = click.option("--seed", type=int, envvar="LPVOC_SEED",
                           default=celp.DEFAULT_SEED, show_default=True,
                           help="codebook generation seed (env: LPVOC_SEED)")


@main.command()
@click.option("--codec", type=click.Choice(sorted(CODECS)), required=True)
@click.option("-i", "input_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("-o", "output_path", type=click.Path(dir_okay=False), required=True)
@click.option("--dump-recon", type=click.Path(dir_okay=False), default=None,
              help="write the encoder-side reconstruction as raw PCM (debug)")
@seed_option
@_handle_errors
def encode(codec, input_path, output_path, dump_recon, seed):
    """Encode a conforming WAV file to an .lpvc bitstream."""
    codec_id, encode_signal, _ = CODECS[codec]
    signal = audio_io.read_wav(input_path)
    result = encode_signal(signal.samples, seed=seed)
    units, count = result[0], result[1]
    data = bitstream.container_write(units, codec_id, count)
    Path(output_path).write_bytes(data)
    if dump_recon is not None:
        if codec == "ldcelp":
            recon = result[2]
        elif codec == "celp":
            # re-run keeping the per-frame local reconstruction
            enc = celp.CelpEncoder(seed=seed)
            x = dsp.pcm_to_float(signal.samples)
            pad = (-x.size) % celp.FRAME_SAMPLES
            if pad:
                x = np.concatenate((x, np.zeros(pad)))
            parts = []
            for i in range(0, x.size, celp.FRAME_SAMPLES):
                enc.encode_frame(x[i : i + celp.FRAME_SAMPLES])
                parts.append(enc.last_reconstruction)
            recon = np.concatenate(parts)[: len(signal.samples)]
        else:
            raise LpvocError("--dump-recon supports celp and ldcelp only")
        audio_io.raw_export(
            audio_io.AudioSignal(samples=dsp.float_to_pcm(recon)), dump_recon)
    payload_bits = len(units) * bitstream.unit_bits(codec_id)
    click.echo(f"units: {len(units)}")
    click.echo(f"payload_bits: {payload_bits}")
    click.echo(f"bitrate_bps: {bitstream.bitrate_of(codec_id)}")


@main.command()
@click.option("-i", "input_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("-o", "output_path", type=click.Path(dir_okay=False), required=True)
@seed_option
@_handle_errors
def decode(input_path, output_path, seed):
    """Decode an .lpvc bitstream back to WAV."""
    data = Path(input_path).read_bytes()
    codec_id, units, count = bitstream.container_read(data)
    _, _, decode_signal = CODECS[CODEC_NAMES[codec_id]]
    out = decode_signal(units, count, seed=seed)
    audio_io.write_wav(audio_io.AudioSignal(samples=dsp.float_to_pcm(out)),
                       output_path)
    click.echo(f"codec: {CODEC_NAMES[codec_id]}")
    click.echo(f"samples: {count}")


@main.command()
@click.option("-i", "input_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("-o", "output_path", type=click.Path(dir_okay=False), required=True)
@click.option("--spectrogram", "mode", flag_value="spectrogram")
@click.option("--pitch", "mode", flag_value="pitch")
@click.option("--intensity", "mode", flag_value="intensity", default=True)
@_handle_errors
def analyze(input_path, output_path, mode):
    """Export a spectrogram, pitch contour, or intensity contour as CSV."""
    signal = audio_io.read_wav(input_path)
    if mode == "spectrogram":
        analysis.export_spectrogram_csv(analysis.spectrogram(signal.samples),
                                        output_path)
    elif mode == "pitch":
        analysis.export_contour_csv(analysis.pitch_contour(signal.samples),
                                    output_path, value_name="pitch_hz")
    else:
        analysis.export_contour_csv(analysis.intensity_contour(signal.samples),
                                    output_path, value_name="intensity_db")


@main.command()
@click.option("-r", "reference", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("-d", "degraded", type=click.Path(exists=True, dir_okay=False),
              required=True)
@_handle_errors
def compare(reference, degraded):
    """Print the segmental SNR between a reference and a degraded file."""
    ref = audio_io.read_wav(reference)
    deg = audio_io.read_wav(degraded)
    n = min(len(ref), len(deg))
    snr = analysis.segmental_snr(ref.samples[:n], deg.samples[:n])
    click.echo(f"{snr:.2f} dB")


@main.command("prepare-mos")
@click.option("-i", "inputs", type=click.Path(exists=True, dir_okay=False),
              multiple=True, required=True)
@click.option("-o", "output_dir", type=click.Path(file_okay=False), required=True)
@seed_option
@_handle_errors
def prepare_mos(inputs, output_dir, seed):
    """Code each input with all three codecs into a blinded sample set."""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = []
    n = 0
    for path in inputs:
        signal = audio_io.read_wav(path)
        for name, (codec_id, encode_signal, decode_signal) in sorted(CODECS.items()):
            result = encode_signal(signal.samples, seed=seed)
            decoded = decode_signal(result[0], result[1], seed=seed)
            sample_id = f"s{n:03d}"
            n += 1
            audio_io.write_wav(
                audio_io.AudioSignal(samples=dsp.float_to_pcm(decoded)),
                out / f"{sample_id}.wav")
            manifest.append({"sample_id": sample_id, "file": f"{sample_id}.wav",
                             "codec": name, "source": Path(path).name})
    with open(out / "manifest.json", "w") as f:
        json.dump(manifest, f, indent=2)
    click.echo(f"prepared {n} samples in {out}")


@main.command()
@click.option("--samples-dir", type=click.Path(exists=True, file_okay=False),
              required=True)
@click.option("--scores", "scores_path", type=click.Path(dir_okay=False),
              default="mos_scores.jsonl", show_default=True)
@click.option("--port", type=int, default=8080, show_default=True)
@click.option("--static-dir", type=click.Path(file_okay=False), default=None,
              help="serve a built web client from this directory")
@seed_option
@_handle_errors
def serve(samples_dir, scores_path, port, static_dir, seed):
    """Run the MOS listening-test HTTP service."""
    import uvicorn

    from .mos.app import create_app

    app = create_app(samples_dir, scores_path, seed=seed, static_dir=static_dir)
    uvicorn.run(app, host="0.0.0.0", port=port)


if __name__ == "__main__":
    main()
