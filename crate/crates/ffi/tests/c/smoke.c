#include <stdio.h>
#include <string.h>

#include "sparqln3.h"

#define CHECK(cond)                                            \
  do {                                                         \
    if (!(cond)) {                                             \
      const char *e = sn3_last_error();                        \
      fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond,   \
              e ? e : "no error");                             \
      return 1;                                                \
    }                                                          \
  } while (0)

int main(void) {
  const char *data = "<http://example.org/#John> "
                     "<http://www.w3.org/1999/02/22-rdf-syntax-ns#type> "
                     "<http://example.org/#Researcher> .\n";
  const char *query = "PREFIX : <http://example.org/#>\n"
                      "CONSTRUCT { ?x a :Person } WHERE { ?x a :Researcher }";
  Sn3Graph *g = NULL;
  Sn3Query *q = NULL;
  Sn3Rules *rules = NULL;
  Sn3Graph *closure = NULL;
  char *text = NULL;
  size_t iterations = 0;

  CHECK(sn3_graph_parse(data, SN3_FORMAT_N_TRIPLES, &g) == SN3_STATUS_OK);
  CHECK(sn3_query_parse(query, &q) == SN3_STATUS_OK);
  CHECK(sn3_query_translate(q, false, &text) == SN3_STATUS_OK);
  CHECK(strstr(text, "{?x a :Researcher.} => {?x a :Person.}.") != NULL);
  CHECK(sn3_rules_parse(text, &rules) == SN3_STATUS_OK);
  sn3_string_free(text);
  CHECK(sn3_reason(g, rules, 100, &closure, &iterations) == SN3_STATUS_OK);
  CHECK(sn3_graph_len(closure) == 2);
  CHECK(sn3_check(q, g, NULL) == SN3_STATUS_OK);
  CHECK(sn3_query_parse("SELECT", &q) == SN3_STATUS_INVALID);
  CHECK(sn3_last_error() != NULL);

  sn3_graph_free(closure);
  sn3_rules_free(rules);
  sn3_graph_free(g);
  printf("ok %s\n", sn3_version());
  return 0;
}
