"""fgembed: extract per-second embeddings from a WAV directory into an
FGEB store readable by the detection pipeline."""

from __future__ import annotations

import argparse
import sys

from .errors import FgembedError
from .extract import extract
from .models import MEL_128x100, RAW_WAVEFORM, resolve_spec
from .store_writer import SESSIONS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fgembed",
                                     description=__doc__.strip())
    parser.add_argument("--model", required=True,
                        help="model id (pyannote-speaker-512, "
                             "timit-household-1000, yamnet) or torchscript:<path>")
    parser.add_argument("--in", dest="in_dir", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--model-path", default=None,
                        help="local checkpoint overriding the registry loader")
    parser.add_argument("--dim", type=int, default=None,
                        help="expected embedding dimension (torchscript models)")
    parser.add_argument("--input", choices=[RAW_WAVEFORM, MEL_128x100],
                        default=None, help="input kind for torchscript models")
    parser.add_argument("--group", default="g00")
    parser.add_argument("--session", choices=list(SESSIONS), default="ChatIndoors")
    parser.add_argument("--batch-size", type=int, default=64)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = resolve_spec(args.model, dim=args.dim, input_kind=args.input)
        path = extract(args.in_dir, spec, args.out, model_path=args.model_path,
                       group_id=args.group, session=args.session,
                       batch_size=args.batch_size)
    except FgembedError as exc:
        print(f"ERROR {exc.code}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"ERROR IOError: {exc}", file=sys.stderr)
        return 1
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
