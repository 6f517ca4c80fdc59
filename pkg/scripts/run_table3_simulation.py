from wgedebayes.config_handler import SimConfig
from wgedebayes.montecarlo import run_simulation, verify_orderings, compare_with_reference
from wgedebayes.post_processing.figures import write_figure_csvs
from wgedebayes.utils import write_csv
import os


if __name__ == '__main__':

    # full-scale run of the bundled monte carlo study (5000 replications per scheme)
    out_dir = 'table3_full'
    os.makedirs(out_dir, exist_ok=True)

    config = SimConfig.default().updated(replications=5000, n_procs=os.cpu_count() or 1)
    config.to_json(os.path.join(out_dir, 'config.json'))

    table = run_simulation(config, log_file=os.path.join(out_dir, 'simulate.log'))
    table.to_csv(os.path.join(out_dir, 'mse_table.csv'))
    write_csv(verify_orderings(table), os.path.join(out_dir, 'ordering_verdicts.csv'))
    write_csv(compare_with_reference(table), os.path.join(out_dir, 'reference_comparison.csv'))
    write_figure_csvs(table, out_dir)
