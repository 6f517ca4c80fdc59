from wgedebayes.verification import run_table2_suite
import os


if __name__ == '__main__':

    # electric data, bundled table1 parameters; writes every cell next to its published value
    out_dir = 'table2'
    os.makedirs(out_dir, exist_ok=True)

    result = run_table2_suite(log_file=os.path.join(out_dir, 'table2.log'))
    result.to_csv(os.path.join(out_dir, 'table2_cells.csv'))
    print(result.to_text(limit=108))
