import json
import time
from pathlib import Path

import numpy as np

# text tables print 7 decimals
TEXT_DECIMALS = 7

# csv numbers: 10 significant digits, '.' decimal separator
CSV_FLOAT_FORMAT = '%.10g'


def write_to_log(log_file, message: str, write=False):
    '''
    write a message to a log file

    :param log_file: path to log file, None to skip logging
    :param message: message to print to the log file
    :param write: True to start a fresh log file (erasing previous log file data)
    '''
    if log_file is not None:
        mode = 'w' if write else 'a'
        with open(log_file, mode) as log:
            log.write(message + '\n')


def log_header(log_file, command):
    '''
    start a new log file with a timestamped header line
    '''
    write_to_log(log_file, f'wgedebayes {command} started {time.strftime("%Y-%m-%d %H:%M:%S")}', write=True)


def ensure_dir(path):
    '''
    create a directory if it does not exist and return it as a Path
    '''
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


def format_value(value, decimals=TEXT_DECIMALS):
    '''
    format a number for a text table
    '''
    if value is None:
        return '-'
    value = float(value)
    if not np.isfinite(value):
        return str(value)
    return f'{value:.{decimals}f}'


def write_csv(df, file_name):
    '''
    write a dataframe as a locale-independent csv with LF line endings
    '''
    df.to_csv(file_name, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')


def write_json(obj, file_name):
    '''
    write a json-serializable object with the package's indentation
    '''
    with open(file_name, 'w') as ff:
        json.dump(obj, ff, indent=4)
        ff.write('\n')


def read_json(file_name):
    with open(file_name) as ff:
        return json.load(ff)
