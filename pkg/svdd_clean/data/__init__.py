from .dataset import (
    DATASET_FORMATS,
    ClassPartition,
    DatasetRecord,
    dump_dataset_jsonl,
    load_dataset,
    partition_by_label,
    split_train_test,
)
from .synth import (
    SynthDataset,
    SynthSpec,
    dump_truth_lines,
    generate,
    read_truth_file,
)
