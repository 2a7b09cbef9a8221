# Matchmaking engine
