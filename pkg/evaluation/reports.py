"""CSV output of the experiments."""
import csv
import logging
import math

from .serializers import COST_COLUMNS, STEALTH_COLUMNS, EvalRecordSerializer, StealthRowSerializer
from .services import COST_VARIABLES

logger = logging.getLogger(__name__)

STD_CONVENTION = 'population'


def _format(value):
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ''
    return value


def _open(path):
    return open(path, 'w', encoding='utf-8', newline='')


def write_cost_csv(records, path):
    with _open(path) as fh:
        writer = csv.DictWriter(fh, fieldnames=COST_COLUMNS, lineterminator='\n')
        writer.writeheader()
        for row in EvalRecordSerializer(records, many=True).data:
            writer.writerow(row)
    logger.info('Wrote %d cost rows to %s', len(records), path)


def write_stealth_csv(report, path):
    """Rows, then the aggregates as '#'-prefixed trailer lines."""
    with _open(path) as fh:
        writer = csv.DictWriter(fh, fieldnames=STEALTH_COLUMNS, lineterminator='\n')
        writer.writeheader()
        for row in StealthRowSerializer(report.rows, many=True).data:
            writer.writerow({name: _format(value) for name, value in row.items()})

        trailer = [
            f'mean_ratio={_format(report.mean_ratio)}',
            f'std_ratio={_format(report.std_ratio)}',
            f'std_convention={STD_CONVENTION}',
            f'mean_normalized_distance={_format(report.mean_normalized_distance)}',
            f'ciphertexts={report.ciphertext_count}',
        ]
        trailer += [f'flagged={row.set_id}' for row in report.rows if row.flagged]
        for set_id, mean in report.mean_ratio_excl.items():
            trailer.append(f'mean_ratio_excl[{set_id}]={mean}')
        for set_id, std in report.std_ratio_excl.items():
            trailer.append(f'std_ratio_excl[{set_id}]={std}')
        for line in trailer:
            fh.write(f'# {line}\n')
    logger.info('Wrote %d stealth rows to %s', len(report.rows), path)


def write_correlation_csv(matrix, path):
    """6x6 matrix with variable names as header row and first column; blanks are undefined."""
    with _open(path) as fh:
        writer = csv.writer(fh, lineterminator='\n')
        writer.writerow(['', *COST_VARIABLES])
        for name, values in zip(COST_VARIABLES, matrix):
            writer.writerow([name, *(_format(float(v)) for v in values)])
    logger.info('Wrote correlation matrix to %s', path)
