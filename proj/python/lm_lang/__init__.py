from ._lm import check, dump_ast, gen_nqueens, gen_pagerank_ring, run

__all__ = ["check", "dump_ast", "gen_nqueens", "gen_pagerank_ring", "run"]
