import numpy as np
import pandas as pd
from rich.console import Console
from rich.table import Table
from typing import Optional


def exibir_tabela(df: pd.DataFrame, titulo: str, max_linhas: int = 30, console: Optional[Console] = None):
    """
    Exibe um DataFrame de resultados em uma tabela formatada no terminal.

    Args:
        df (pd.DataFrame): O DataFrame com os resultados do comando.
        titulo (str): Título da tabela.
        max_linhas (int): Linhas exibidas; o restante fica só no CSV.
        console (Console): Console de saída (stderr por padrão, para não misturar com dados).
    """
    console = console or Console(stderr=True)
    table = Table(title=f"--- {titulo} ---", show_header=True, header_style="bold magenta")

    for column in df.columns:
        table.add_column(str(column), justify="center")

    for _, row in df.head(max_linhas).iterrows():
        # Números em notação curta; booleanos coloridos
        row_str = []
        for val in row:
            if isinstance(val, (bool, np.bool_)):
                row_str.append("[green]sim[/green]" if val else "[red]não[/red]")
            elif isinstance(val, float):
                row_str.append(f"{val:.6g}")
            else:
                row_str.append(str(val))
        table.add_row(*row_str)

    if len(df) > max_linhas:
        table.caption = f"{len(df) - max_linhas} linha(s) omitida(s)"
    console.print(table)
