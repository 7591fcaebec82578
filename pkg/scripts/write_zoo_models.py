"""
Write every zoo model, with its default parameters, as a model JSON file.

Usage (from repo root):
    python scripts/write_zoo_models.py [OUT_DIR]

The files load with `--model` exactly like the hand-written ones in
model_files/ and are a starting point for custom models.
"""

import sys
from pathlib import Path

# Ensure the package is importable when run as a script
ROOT_DIR = Path(__file__).resolve().parent.parent
if str(ROOT_DIR) not in sys.path:
    sys.path.append(str(ROOT_DIR))

from sme_correlate.models.zoo import ZOO, model_zoo
from sme_correlate.schemas.model_file import dump_model_file


def write_zoo_models(out_dir: Path = ROOT_DIR / "model_files" / "zoo") -> None:
    """
    Dump each ZOO entry to OUT_DIR/<name>.json, overwriting existing files.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, factory in ZOO.items():
        model, rho0 = model_zoo(name)
        doc = (factory.__doc__ or "").strip().splitlines()
        path = dump_model_file(out_dir / f"{name}.json", model, rho0, description=doc[0] if doc else name)
        print(f"wrote {path} (dim {model.dim}, detectors {', '.join(model.labels)})")


if __name__ == "__main__":
    if len(sys.argv) > 1:
        write_zoo_models(Path(sys.argv[1]))
    else:
        write_zoo_models()
