NAME = "wgedebayes"
VERSION = "v0.1"
