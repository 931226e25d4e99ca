#ifndef TSEL_H
#define TSEL_H

/* C interface to the test-selection engine. All functions return a
 * tsel_status; on failure, tsel_last_error() describes what went wrong
 * (thread-local, valid until the next failing call on the same thread). */

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    TSEL_OK = 0,
    TSEL_ERR_USAGE = 1,  /* bad arguments or configuration */
    TSEL_ERR_DATA = 2,   /* unreadable or malformed input data */
    TSEL_ERR_MODEL = 3   /* unreadable, incompatible, or unfittable model */
} tsel_status;

const char* tsel_last_error(void);

/* A loaded model artifact: the fitted ensemble plus the feature vocabulary
 * and the history snapshot needed to score new changes. */
typedef struct tsel_model tsel_model;

typedef struct tsel_train_options {
    const char* commits_path;  /* commit log, line-delimited JSON */
    const char* results_path;  /* test results, line-delimited JSON */
    const char* model_out;     /* where to write the model artifact */
    int train_days;            /* <= 0: default 56 */
    int val_days;              /* <= 0: default 14 */
    int tune;                  /* nonzero: grid search on the validation window */
    int n_trees;               /* used when tune == 0; <= 0: default 200 */
    int max_depth;             /* used when tune == 0; <= 0: default 6 */
    double learning_rate;      /* used when tune == 0; <= 0: default 0.1 */
} tsel_train_options;

tsel_status tsel_train(const tsel_train_options* options);

tsel_status tsel_model_open(const char* path, tsel_model** out);
void tsel_model_close(tsel_model* model);
int tsel_model_num_trees(const tsel_model* model);

typedef struct tsel_predict_options {
    const char* change_path;  /* one change, JSON: {id, ts, files[], diff?, language?} */
    const char* tests_path;   /* NULL: the tests recorded in the model */
    const char* out_path;     /* selection report, JSON */
    long k;                   /* <= 0: default 50 */
    int dependency_hops;      /* < 0: default 1 */
} tsel_predict_options;

tsel_status tsel_predict(const tsel_model* model, const tsel_predict_options* options);

typedef struct tsel_evaluate_options {
    const char* results_path;   /* held-out cycles, line-delimited JSON */
    const char* out_path;       /* metric report, JSON */
    long k;                     /* <= 0: default 50 */
    unsigned long long seed;    /* for the random-selection baseline */
} tsel_evaluate_options;

tsel_status tsel_evaluate(const tsel_model* model, const tsel_evaluate_options* options);

typedef struct tsel_bench_options {
    const char* dataset_path;  /* public CI dataset, ";"-delimited CSV */
    const char* schema;        /* NULL or "iofrol_gsdtsr" */
    const char* out_path;      /* result table, CSV */
    double budget;             /* fraction of each suite; <= 0: default 0.5 */
    double train_fraction;     /* chronological split; <= 0: default 0.67 */
} tsel_bench_options;

tsel_status tsel_bench(const tsel_bench_options* options);

typedef struct tsel_synth_options {
    const char* config_path;  /* NULL: defaults */
    unsigned long long seed;
    const char* out_dir;
} tsel_synth_options;

tsel_status tsel_synth(const tsel_synth_options* options);

#ifdef __cplusplus
}
#endif

#endif /* TSEL_H */
