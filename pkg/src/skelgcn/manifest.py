"""Corpus manifest: ``image_id,path,fluence_class,angle_class,structure``."""
import csv
import io
from dataclasses import dataclass
from pathlib import Path

from .errors import ManifestError

FIELDS = ("image_id", "path", "fluence_class", "angle_class", "structure")
STRUCTURES = ("wall", "hole")


@dataclass(frozen=True)
class ManifestEntry:
    image_id: str
    path: str
    fluence_class: int
    angle_class: int
    structure: str


def manifest_to_csv(entries):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FIELDS)
    for e in entries:
        writer.writerow([e.image_id, e.path, e.fluence_class, e.angle_class, e.structure])
    return buf.getvalue()


def parse_manifest(text, base_dir=None, check_files=False):
    """Parse manifest CSV text. Relative paths resolve against ``base_dir``."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or tuple(reader.fieldnames) != FIELDS:
        raise ManifestError(f"manifest header must be {','.join(FIELDS)}")
    entries = []
    seen = set()
    for lineno, row in enumerate(reader, start=2):
        try:
            entry = ManifestEntry(row["image_id"], row["path"], int(row["fluence_class"]),
                                  int(row["angle_class"]), row["structure"])
        except (TypeError, ValueError):
            raise ManifestError(f"line {lineno}: malformed row") from None
        if entry.fluence_class not in (1, 2, 3) or entry.angle_class not in (1, 2, 3):
            raise ManifestError(f"line {lineno}: classes must be 1, 2 or 3")
        if entry.structure not in STRUCTURES:
            raise ManifestError(f"line {lineno}: structure must be wall or hole")
        if entry.image_id in seen:
            raise ManifestError(f"duplicate image_id {entry.image_id!r}")
        seen.add(entry.image_id)
        entries.append(entry)
    if check_files:
        missing = [e.path for e in entries if not resolve_path(e, base_dir).is_file()]
        if missing:
            raise ManifestError("referenced files do not exist", missing)
    return entries


def load_manifest(path, check_files=True):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc.strerror}") from exc
    return parse_manifest(text, base_dir=path.parent, check_files=check_files)


def resolve_path(entry, base_dir=None):
    p = Path(entry.path)
    if not p.is_absolute() and base_dir is not None:
        p = Path(base_dir) / p
    return p
