'''
plot-ready series of the simulation MSEs: one csv per target with the MSE of every estimator against the
sample size, for the 50%, 70% and 100% design families
'''

import os

import pandas as pd

from wgedebayes.montecarlo import design_family
from wgedebayes.utils import write_csv

# figure file stem per target
FIGURE_FILES = {'alpha': 'fig1', 'series': 'fig2', 'parallel': 'fig3', 'hazard': 'fig4'}

FIGURE_COLUMNS = ('n', 'fraction', 'estimator', 'loss', 'mse')


def figure_series(table, target):
    '''
    the MSE series of one target

    :param table: MseTable
    :param target: target name
    :return: DataFrame with columns n, fraction, estimator, loss, mse, sorted by fraction, estimator and n
    '''
    rows = []
    for scheme in table.schemes:
        for est in table.estimators:
            if not table.has(scheme, est, target):
                continue
            row = table.get(scheme, est, target)
            rows.append((scheme.n, design_family(scheme), est, row['loss'], row['mse']))
    df = pd.DataFrame(rows, columns=list(FIGURE_COLUMNS))
    order = {est: i for i, est in enumerate(table.estimators)}
    return df.sort_values(
        ['fraction', 'estimator', 'n'], key=lambda col: col.map(order) if col.name == 'estimator' else col, kind='stable'
    ).reset_index(drop=True)


def write_figure_csvs(table, out_dir):
    '''
    write fig1.csv .. fig4.csv for the targets present in the table

    :param table: MseTable
    :param out_dir: output directory
    :return: dict file stem -> path
    '''
    paths = {}
    for target, stem in FIGURE_FILES.items():
        if target not in table.targets:
            continue
        path = os.path.join(out_dir, f'{stem}.csv')
        write_csv(figure_series(table, target), path)
        paths[stem] = path
    return paths
