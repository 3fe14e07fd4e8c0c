"""Write the three example source models to models/."""

import argparse
import json
from pathlib import Path

from gaussib.models import ar1_model_dict, flat_model_dict, halfband_model_dict, model_from_dict


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "models"))
    parser.add_argument("--grid-points", type=int, default=4096)
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, build in (("flat", flat_model_dict), ("ar1", ar1_model_dict),
                        ("halfband", halfband_model_dict)):
        doc = build(args.grid_points)
        model_from_dict(doc)
        (out / f"{name}.json").write_text(json.dumps(doc, indent=1) + "\n")
        print(out / f"{name}.json")


if __name__ == "__main__":
    main()
