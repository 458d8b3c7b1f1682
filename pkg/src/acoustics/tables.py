"""
Feature tables: CSV with a `recording_id` column followed by feature columns.

An empty cell is the missing-value sentinel. Columns that the schema does not
declare are kept under their own names.
"""

import logging
import math
from pathlib import Path
from typing import Dict, Mapping

import pandas as pd

from .exceptions import DuplicateKey, ParseError
from .models import FeatureSchema, HandcraftedFeatureVector, Provenance

logger = logging.getLogger(__name__)

KEY_COLUMN = 'recording_id'
FLOAT_FORMAT = '%.17g'


def _parse_cell(raw: str, schema: FeatureSchema, row: int, column: str):
    cell = raw.strip()
    if cell == schema.missing_sentinel:
        return None
    try:
        value = float(cell)
    except ValueError:
        raise ParseError('Feature cell is not numeric.', row=row, column=column, value=raw)
    if not math.isfinite(value):
        raise ParseError('Feature cell is not finite.', row=row, column=column, value=raw)
    return value


def ingest_feature_table(path, schema: FeatureSchema) -> Dict[str, HandcraftedFeatureVector]:
    frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding='utf-8')
    if KEY_COLUMN not in frame.columns:
        raise ParseError(f'Feature table has no {KEY_COLUMN} column.', path=str(path))
    missing_columns = [name for name in schema.names if name not in frame.columns]
    if missing_columns:
        raise ParseError('Feature table lacks declared columns.', path=str(path), columns=missing_columns)

    feature_columns = [column for column in frame.columns if column != KEY_COLUMN]
    vectors = {}
    # row numbers are 1-based data rows; the header is row 0
    for row, record in enumerate(frame.to_dict(orient='records'), start=1):
        recording_id = record[KEY_COLUMN].strip()
        if recording_id in vectors:
            raise DuplicateKey('Recording appears twice in the feature table.', recording_id=recording_id, row=row)
        values = {column: _parse_cell(record[column], schema, row, column) for column in feature_columns}
        vectors[recording_id] = HandcraftedFeatureVector(values=values, provenance=Provenance.INGESTED)
    logger.info(f'Ingested {len(vectors)} feature rows with {len(feature_columns)} columns from {path}')
    return vectors


def write_feature_table(path, vectors: Mapping[str, HandcraftedFeatureVector]) -> Path:
    """Export sorted by recording_id with round-trip float precision."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = []
    for vector in vectors.values():
        for name in vector.names:
            if name not in columns:
                columns.append(name)
    rows = [
        {KEY_COLUMN: recording_id, **vectors[recording_id].values}
        for recording_id in sorted(vectors)
    ]
    frame = pd.DataFrame(rows, columns=[KEY_COLUMN, *columns])
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep='', encoding='utf-8', lineterminator='\n')
    return path


def merge_feature_tables(*tables: Mapping[str, HandcraftedFeatureVector]) -> Dict[str, HandcraftedFeatureVector]:
    """Union of feature columns per recording; later tables win on name clashes."""
    merged: Dict[str, dict] = {}
    provenance = {}
    for table in tables:
        for recording_id, vector in table.items():
            merged.setdefault(recording_id, {}).update(vector.values)
            provenance[recording_id] = vector.provenance
    return {
        recording_id: HandcraftedFeatureVector(values=values, provenance=provenance[recording_id])
        for recording_id, values in merged.items()
    }
