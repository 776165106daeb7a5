#!/usr/bin/env python3
"""Regenerates corpus/flat and corpus/perturbed from corpus/models.

Flat forms are the evaluated Core Caddy of each model; perturbed forms are a
fixed-seed, jitter-free obfuscation of the flat form.
"""
import argparse
import pathlib
import subprocess

ROOT = pathlib.Path(__file__).resolve().parent.parent


def run(cli, *args):
    return subprocess.run([str(cli), *args], check=True, capture_output=True, text=True).stdout


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cli", default=ROOT / "build" / "cadshrink")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    corpus = ROOT / "corpus"
    (corpus / "flat").mkdir(exist_ok=True)
    (corpus / "perturbed").mkdir(exist_ok=True)
    for model in sorted((corpus / "models").glob("*.caddy")):
        flat = corpus / "flat" / (model.stem + ".csexp")
        flat.write_text(run(args.cli, "eval", str(model)))
        perturbed = corpus / "perturbed" / (model.stem + ".csexp")
        perturbed.write_text(run(args.cli, "perturb", str(flat), "--seed", str(args.seed)))
        print(model.stem)


if __name__ == "__main__":
    main()
