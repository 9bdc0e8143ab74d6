"""One-shot training, evaluation, noise and a save/load round trip."""

import tempfile
from pathlib import Path

import numpy as np

from amshd import EncoderConfig, SourceKind, SplitSpec, evaluate, load, noise_robustness, save
from amshd.data import LabelScheme
from amshd.pipeline import fit, load_dataset, prepare
from amshd.synthetic import write_ams_like_csv

work = Path(tempfile.mkdtemp())
write_ams_like_csv(work / "ams.csv", n_subjects=60, seed=0)
prep = prepare(load_dataset(work / "ams.csv"), LabelScheme.BINARY, SplitSpec(seed=42))

for source in SourceKind:
    model = fit(prep, EncoderConfig(dim=1000, source=source, seed=42))
    clean = evaluate(model, prep.X_test, prep.y_test)
    noisy = noise_robustness(model, prep.X_test, prep.y_test, 0.1, seed=0)
    print(f"{source.name.lower():<8} acc={clean.accuracy:.3f}  macroF1={clean.macro_f1:.3f}  acc@10%flips={noisy.accuracy:.3f}")

save(model, work / "model.amshd")
back = load(work / "model.amshd")
same = np.array_equal(evaluate(back, prep.X_test, prep.y_test).predictions, clean.predictions)
print(f"model file {(work / 'model.amshd').stat().st_size} bytes, reloaded predictions identical: {same}")
