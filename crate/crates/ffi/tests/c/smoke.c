#include <stdio.h>
#include <string.h>

#include "gectool.h"

#define CHECK(cond)                                                  \
  do {                                                               \
    if (!(cond)) {                                                   \
      fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #cond, \
              gt_last_error());                                      \
      return 1;                                                      \
    }                                                                \
  } while (0)

int main(void) {
  double f = 0.0;
  CHECK(gt_f_beta(0.5, 1.0, 0.5, &f) == GT_STATUS_OK);
  CHECK(f > 0.5555 && f < 0.5556);
  CHECK(gt_f_beta(1.5, 1.0, 0.5, &f) == GT_STATUS_INVALID_ARGUMENT);
  CHECK(strlen(gt_last_error()) > 0);

  char *tokens = NULL;
  CHECK(gt_tokenize("Hello, world!", &tokens) == GT_STATUS_OK);
  CHECK(strcmp(tokens, "Hello , world !") == 0);
  gt_string_free(tokens);

  char *m2 = NULL;
  CHECK(gt_extract_m2("a b c", "a c", true, &m2) == GT_STATUS_OK);
  CHECK(strstr(m2, "A 1 2|||") != NULL);

  GtScorer *scorer = NULL;
  CHECK(gt_scorer_new(0.5, &scorer) == GT_STATUS_OK);
  CHECK(gt_scorer_add(scorer, m2, "a c") == GT_STATUS_OK);
  char *report = NULL;
  CHECK(gt_scorer_report_json(scorer, &report) == GT_STATUS_OK);
  CHECK(strstr(report, "\"tp\": 1") != NULL);
  gt_string_free(report);
  gt_scorer_free(scorer);
  gt_string_free(m2);

  GtNoiser *noiser = NULL;
  CHECK(gt_noiser_new("xx", NULL, 1, NULL, &noiser) == GT_STATUS_INVALID_ARGUMENT);
  CHECK(gt_noiser_new("cs", NULL, 1, "pes\nles\nves\n", &noiser) == GT_STATUS_OK);
  char *a = NULL, *b = NULL;
  CHECK(gt_noiser_corrupt(noiser, "Ten pes běžel přes louku .", 7, true, &a) == GT_STATUS_OK);
  CHECK(gt_noiser_corrupt(noiser, "Ten pes běžel přes louku .", 7, true, &b) == GT_STATUS_OK);
  CHECK(strcmp(a, b) == 0);
  gt_string_free(a);
  gt_string_free(b);
  gt_noiser_free(noiser);

  printf("ok %s\n", gt_version());
  return 0;
}
